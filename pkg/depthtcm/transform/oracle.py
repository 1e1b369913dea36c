# -*- coding: utf-8 -*-
"""Exhaustive enumeration of the b-bit MWD codebook.

Along the working range every quantized channel is piecewise constant, so the
triple seen by the decoder only changes at a finite set of depths.  Walking
the intervals between those depths gives every reachable quantized triple and
the exact worst-case decode error.
"""
from __future__ import annotations
import math
from dataclasses import dataclass

import numpy as np

from .mwd import TWO_PI, DepthMap, FringeParams, mwd_encode, working_depth
from .quantizer import dequantize_mwd, quantize_mwd
from .util import round_half_away


@dataclass
class Codebook:
    lo: np.ndarray
    hi: np.ndarray
    symbols: np.ndarray
    decoded: np.ndarray
    order: np.ndarray
    expected_order: np.ndarray

    def __len__(self) -> int:
        return int(self.lo.size)

    @property
    def errors(self) -> np.ndarray:
        return np.maximum(np.abs(self.decoded - self.lo), np.abs(self.decoded - self.hi))

    @property
    def worst_error(self) -> float:
        return float(self.errors.max())

    @property
    def orders_exact(self) -> bool:
        return bool(np.array_equal(self.order, self.expected_order))


def codebook_breakpoints(params: FringeParams, bits: int) -> np.ndarray:
    """Working depths at which some quantized channel changes code."""
    top = (1 << bits) - 1
    thresholds = 2. * (np.arange(top) + .5) / top - 1.
    base = np.concatenate([
        np.arcsin(thresholds),
        math.pi - np.arcsin(thresholds),
        np.arccos(thresholds),
        -np.arccos(thresholds),
    ]) % TWO_PI
    cycles = np.arange(params.max_order + 1)
    phase_cuts = (base[None, :] + TWO_PI * cycles[:, None]).ravel() * params.period / TWO_PI
    blue_cuts = (np.arange(top) + .5) / top * params.z_range
    cuts = np.concatenate([phase_cuts, blue_cuts])
    cuts = cuts[(cuts > 0.) & (cuts < params.z_range)]
    return np.unique(np.concatenate([[0.], cuts, [params.z_range]]))


def quantized_codebook(params: FringeParams, bits: int) -> Codebook:
    cuts = codebook_breakpoints(params, bits)
    lo, hi = cuts[:-1], cuts[1:]
    keep = hi > lo
    lo, hi = lo[keep], hi[keep]
    mid = .5 * (lo + hi)

    values = (mid + params.z_offset)[None, :]
    depth = DepthMap(values, np.ones_like(values, dtype=bool),
                     float(values.min()), float(values.max()))
    quantized = quantize_mwd(mwd_encode(depth, params, bits), (bits, bits, bits))
    restored = dequantize_mwd(quantized, params)
    decoded, phase = working_depth(restored)

    frac = np.where(phase.wrapped >= 0, phase.wrapped, phase.wrapped + TWO_PI) / TWO_PI
    expected = round_half_away(mid / params.period - frac[0])
    expected = np.clip(expected, 0, params.max_order).astype(np.int64)

    symbols = np.stack([quantized.r[0], quantized.g[0], quantized.b[0]], axis=1)
    return Codebook(lo, hi, symbols, decoded[0], phase.order[0], expected)


def worst_case_decode_error(params: FringeParams, bits: int) -> float:
    return quantized_codebook(params, bits).worst_error
