# -*- coding: utf-8 -*-
#
# depthtcm
# Copyright (C) 2025  depthtcm contributors
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU Affero General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Affero General Public License for more details.
#
# You should have received a copy of the GNU Affero General Public License
# along with this program.  If not, see <http://www.gnu.org/licenses/>.
#
from __future__ import annotations
import logging
import math
import struct
from dataclasses import dataclass

import numpy as np
import torch

from typing import Optional, Tuple

from ..exceptions import BitsOutOfRange, QuantizationError, SymbolOutOfRange
from .constants import (
    ADAPTIVE_MAX_BITS,
    ADAPTIVE_MIN_BITS,
    DEFAULT_BITS,
    MAX_BITS,
    MIN_BITS,
)
from .mwd import FringeParams, MwdImage

_logger = logging.getLogger("depthtcm.transform")

QUANT_MAP_HEADER = struct.Struct("<HBB")


def _check_bits(bits: int) -> int:
    if isinstance(bits, bool) or int(bits) != bits or not MIN_BITS <= bits <= MAX_BITS:
        raise BitsOutOfRange(f"Bit depth must be in [{MIN_BITS}, {MAX_BITS}], got {bits!r}")
    return int(bits)


def levels(bits) -> np.ndarray:
    """Largest symbol for a bit depth (scalar or per-pixel array)."""
    return (np.left_shift(1, np.asarray(bits, dtype=np.int64)) - 1).astype(np.float64)


@dataclass
class AdaptiveQuantMap:
    patch_size: int
    bit_lo: int
    bit_hi: int
    bits: np.ndarray
    complexity: Optional[np.ndarray] = None

    @property
    def grid(self) -> Tuple[int, int]:
        return tuple(self.bits.shape)  # type: ignore

    @property
    def code_width(self) -> int:
        span = self.bit_hi - self.bit_lo + 1
        return int(math.ceil(math.log2(span))) if span > 1 else 0

    @property
    def side_bits(self) -> int:
        return int(self.bits.size) * self.code_width

    def expand(self, height: int, width: int) -> np.ndarray:
        """Per-pixel bit depth, ragged edge patches cropped."""
        p = self.patch_size
        full = np.repeat(np.repeat(self.bits, p, axis=0), p, axis=1)
        return full[:height, :width]


@dataclass
class QuantizedMwd:
    r: np.ndarray
    g: np.ndarray
    b: np.ndarray
    bits_r: int
    bits_g: int
    bits_b: int
    params: Optional[FringeParams] = None
    bit_map: Optional[AdaptiveQuantMap] = None

    @property
    def height(self) -> int:
        return int(self.r.shape[0])

    @property
    def width(self) -> int:
        return int(self.r.shape[1])

    @property
    def bits(self) -> Tuple[int, int, int]:
        return (self.bits_r, self.bits_g, self.bits_b)

    def planes(self):
        return [(self.r, self.bits_r), (self.g, self.bits_g), (self.b, self.bits_b)]

    def validate(self) -> None:
        for name, (plane, bits) in zip("rgb", self.planes()):
            _check_bits(bits)
            if plane.size and (plane.min() < 0 or plane.max() > (1 << bits) - 1):
                raise SymbolOutOfRange(
                    f"Plane {name} has symbols outside [0, {(1 << bits) - 1}]"
                )


def quantize_uniform(plane: np.ndarray, bits) -> np.ndarray:
    """Round-half-away quantization of [0, 1] values to b-bit integers.

    ``bits`` may also be a per-pixel array (adaptive patches); every entry is
    range checked.
    """
    bits_arr = np.asarray(bits)
    if bits_arr.ndim == 0:
        _check_bits(bits_arr.item())
    elif bits_arr.size and (bits_arr.min() < MIN_BITS or bits_arr.max() > MAX_BITS):
        raise BitsOutOfRange(f"Per-pixel bit depths outside [{MIN_BITS}, {MAX_BITS}]")
    v = np.clip(np.asarray(plane, dtype=np.float64), 0., 1.)
    return np.floor(v * levels(bits_arr) + .5).astype(np.int64)


def dequantize_uniform(q: np.ndarray, bits) -> np.ndarray:
    bits_arr = np.asarray(bits)
    if bits_arr.ndim == 0:
        _check_bits(bits_arr.item())
    q = np.asarray(q, dtype=np.int64)
    top = levels(bits_arr)
    if q.size and (q.min() < 0 or np.any(q > top)):
        raise SymbolOutOfRange(
            f"Symbols outside [0, 2^bits - 1]: min {q.min()}, max {q.max()}"
        )
    return q / top


class _SnapToLevels(torch.autograd.Function):
    """Hard b-bit snap forward, identity gradient backward."""

    @staticmethod
    def forward(ctx, x: torch.Tensor, top: float) -> torch.Tensor:
        return torch.floor(torch.clamp(x, 0., 1.) * top + .5) / top

    @staticmethod
    def backward(ctx, grad_output: torch.Tensor):
        return grad_output, None


def quantize_train_proxy(
    plane: torch.Tensor,
    bits: int,
    mode: str = "ste",
    generator: Optional[torch.Generator] = None
) -> torch.Tensor:
    bits = _check_bits(bits)
    top = float((1 << bits) - 1)
    if mode == "ste":
        return _SnapToLevels.apply(plane, top)
    if mode == "noise":
        step = 1. / top
        noise = torch.rand(
            plane.shape, generator=generator, dtype=plane.dtype, device=plane.device
        )
        return plane + (noise - .5) * step
    raise QuantizationError(f"Unknown training proxy mode: {mode!r}")


def blue_complexity(b: np.ndarray, patch_size: int) -> np.ndarray:
    """Mean gradient magnitude of the blue channel per patch."""
    b = np.asarray(b, dtype=np.float64)
    if min(b.shape) > 1:
        gy, gx = np.gradient(b)
    else:
        gy = np.zeros_like(b)
        gx = np.zeros_like(b)
    magnitude = np.hypot(gx, gy)
    h, w = b.shape
    rows = -(-h // patch_size)
    cols = -(-w // patch_size)
    scores = np.zeros((rows, cols), dtype=np.float64)
    for i in range(rows):
        for j in range(cols):
            block = magnitude[i * patch_size:(i + 1) * patch_size,
                              j * patch_size:(j + 1) * patch_size]
            scores[i, j] = block.mean()
    return scores


def allocate_bits(complexity: np.ndarray, bit_lo: int, bit_hi: int) -> np.ndarray:
    """Bin each patch's complexity quantile linearly into [bit_lo, bit_hi].

    The bin edges are the complexity quantiles at evenly spaced levels; a
    patch only moves up a level when it is strictly more complex than the
    edge; a constant map stays at ``bit_lo``.
    """
    complexity = np.asarray(complexity, dtype=np.float64)
    levels = bit_hi - bit_lo + 1
    if levels == 1 or complexity.size <= 1:
        return np.full(complexity.shape, bit_lo, dtype=np.int64)
    edges = np.quantile(complexity, np.linspace(0., 1., levels + 1)[1:-1])
    return (bit_lo + np.digitize(complexity, edges, right=True)).astype(np.int64)


def adaptive_quantize(
    image: MwdImage,
    patch_size: int = 16,
    bit_lo: int = ADAPTIVE_MIN_BITS,
    bit_hi: int = ADAPTIVE_MAX_BITS,
    blue_bits: Optional[int] = None,
) -> Tuple[QuantizedMwd, AdaptiveQuantMap]:
    """Patch-wise bit allocation for the phase channels.

    The blue channel carries the fringe order, so it stays at one global depth
    (``blue_bits``, default ``bit_hi``); r and g take the per-patch depth.
    """
    _check_bits(bit_lo)
    _check_bits(bit_hi)
    if bit_lo > bit_hi:
        raise BitsOutOfRange(f"bit_lo {bit_lo} exceeds bit_hi {bit_hi}")
    if patch_size < 2 or patch_size > 0xFFFF:
        raise QuantizationError(f"Patch size must be in [2, 65535], got {patch_size}")
    blue_bits = _check_bits(bit_hi if blue_bits is None else blue_bits)

    complexity = blue_complexity(image.b, patch_size)
    qmap = AdaptiveQuantMap(
        patch_size, bit_lo, bit_hi, allocate_bits(complexity, bit_lo, bit_hi), complexity
    )
    h, w = image.shape
    per_pixel = qmap.expand(h, w)
    quantized = QuantizedMwd(
        quantize_uniform(image.r, per_pixel),
        quantize_uniform(image.g, per_pixel),
        quantize_uniform(image.b, blue_bits),
        bit_hi, bit_hi, blue_bits,
        params=image.params,
        bit_map=qmap,
    )
    _logger.debug(
        f"Adaptive map {qmap.grid[0]}x{qmap.grid[1]} patches, "
        f"mean bits {qmap.bits.mean():.3f}, side info {qmap.side_bits} bits"
    )
    return quantized, qmap


def serialize_quant_map(qmap: AdaptiveQuantMap) -> bytes:
    header = QUANT_MAP_HEADER.pack(qmap.patch_size, qmap.bit_lo, qmap.bit_hi)
    width = qmap.code_width
    if width == 0:
        return header
    codes = (qmap.bits.ravel() - qmap.bit_lo).astype(np.uint32)
    shifts = np.arange(width, dtype=np.uint32)
    bitplane = ((codes[:, None] >> shifts) & 1).astype(np.uint8).ravel()
    return header + np.packbits(bitplane, bitorder="little").tobytes()


def parse_quant_map(data: bytes, height: int, width: int) -> AdaptiveQuantMap:
    if len(data) < QUANT_MAP_HEADER.size:
        raise QuantizationError("Quantization map shorter than its header")
    patch_size, bit_lo, bit_hi = QUANT_MAP_HEADER.unpack_from(data)
    if patch_size < 2 or bit_lo > bit_hi:
        raise QuantizationError(
            f"Corrupt quantization map header: patch {patch_size}, bits {bit_lo}..{bit_hi}"
        )
    rows = -(-height // patch_size)
    cols = -(-width // patch_size)
    qmap = AdaptiveQuantMap(patch_size, bit_lo, bit_hi, np.full((rows, cols), bit_lo, dtype=np.int64))
    code_width = qmap.code_width
    if code_width == 0:
        return qmap
    count = rows * cols
    payload = np.frombuffer(data, dtype=np.uint8, offset=QUANT_MAP_HEADER.size)
    if payload.size * 8 < count * code_width:
        raise QuantizationError(
            f"Quantization map truncated: need {count * code_width} bits, "
            f"have {payload.size * 8}"
        )
    bitplane = np.unpackbits(payload, bitorder="little")[:count * code_width]
    bitplane = bitplane.reshape(count, code_width).astype(np.int64)
    codes = (bitplane << np.arange(code_width, dtype=np.int64)).sum(axis=1)
    qmap.bits = (codes + bit_lo).reshape(rows, cols)
    if qmap.bits.max() > bit_hi:
        raise QuantizationError("Quantization map code exceeds its declared bit range")
    return qmap


def quantize_mwd(
    image: MwdImage, bits: Tuple[int, int, int] = (DEFAULT_BITS,) * 3
) -> QuantizedMwd:
    bits_r, bits_g, bits_b = (_check_bits(b) for b in bits)
    return QuantizedMwd(
        quantize_uniform(image.r, bits_r),
        quantize_uniform(image.g, bits_g),
        quantize_uniform(image.b, bits_b),
        bits_r, bits_g, bits_b,
        params=image.params,
    )


def dequantize_mwd(
    quantized: QuantizedMwd,
    params: Optional[FringeParams] = None,
    valid: Optional[np.ndarray] = None
) -> MwdImage:
    params = params or quantized.params
    if params is None:
        raise QuantizationError("Fringe parameters are required to rebuild the MWD image")
    if quantized.bit_map is not None:
        per_pixel = quantized.bit_map.expand(quantized.height, quantized.width)
        r = dequantize_uniform(quantized.r, per_pixel)
        g = dequantize_uniform(quantized.g, per_pixel)
    else:
        r = dequantize_uniform(quantized.r, quantized.bits_r)
        g = dequantize_uniform(quantized.g, quantized.bits_g)
    b = dequantize_uniform(quantized.b, quantized.bits_b)
    return MwdImage(r, g, b, params, valid)
