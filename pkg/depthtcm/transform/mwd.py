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
"""Multiwavelength depth encoding.

A depth map is shifted to its working range origin, then written as a
sin/cos pair of a short-period phase (red, green) plus the normalized depth
(blue).  Decoding recovers the wrapped phase with atan2, reads the fringe
order from the blue channel and unwraps.
"""
from __future__ import annotations
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from typing import Optional, Tuple

from ..exceptions import AllInvalid, RangeViolation
from .constants import (
    DEFAULT_BITS,
    DEFAULT_PERIOD,
    INVALID_CODEWORD,
    RANGE_TOLERANCE,
)
from .util import resolvable_span, round_half_away

TWO_PI = 2. * math.pi

_logger = logging.getLogger("depthtcm.transform")


@dataclass
class DepthMap:
    values: np.ndarray
    valid: np.ndarray
    z_min: float
    z_max: float

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        self.valid = np.asarray(self.valid, dtype=bool)
        if self.values.ndim != 2:
            raise ValueError(f"Depth map must be 2-D, got shape {self.values.shape}")
        if self.values.shape != self.valid.shape:
            raise ValueError(
                f"Mask shape {self.valid.shape} does not match depth shape "
                f"{self.values.shape}"
            )

    @classmethod
    def from_values(
        cls, values: np.ndarray, valid: Optional[np.ndarray] = None
    ) -> DepthMap:
        values = np.asarray(values, dtype=np.float64)
        if valid is None:
            valid = np.isfinite(values)
        valid = np.asarray(valid, dtype=bool) & np.isfinite(values)
        values = np.where(valid, values, 0.)
        if valid.any():
            z_min = float(values[valid].min())
            z_max = float(values[valid].max())
        else:
            z_min = z_max = 0.
        return cls(values, valid, z_min, z_max)

    @property
    def height(self) -> int:
        return int(self.values.shape[0])

    @property
    def width(self) -> int:
        return int(self.values.shape[1])

    @property
    def pixel_count(self) -> int:
        return self.height * self.width

    @property
    def valid_count(self) -> int:
        return int(self.valid.sum())


@dataclass(frozen=True)
class FringeParams:
    period: float = DEFAULT_PERIOD
    z_offset: float = 0.
    z_range: float = DEFAULT_PERIOD

    def __post_init__(self) -> None:
        if not self.period > 0:
            raise RangeViolation(f"Fringe period must be positive, got {self.period}")
        if not self.z_range > 0:
            raise RangeViolation(f"Working range must be positive, got {self.z_range}")

    @property
    def periods(self) -> float:
        return self.z_range / self.period

    @property
    def max_order(self) -> int:
        return int(math.ceil(self.z_range / self.period))

    def resolvable(self, bits: int) -> bool:
        bound = resolvable_span(self.period, bits)
        return self.z_range <= bound * (1. + RANGE_TOLERANCE)

    @classmethod
    def for_depth(cls, depth: DepthMap, period: float = DEFAULT_PERIOD) -> FringeParams:
        """Working range of a prescaled depth map; constant maps get one period."""
        span = depth.z_max - depth.z_min
        if span <= 0:
            return cls(period=period, z_offset=depth.z_min, z_range=period)
        return cls(period=period, z_offset=depth.z_min, z_range=span)


@dataclass(frozen=True)
class ScaleRecord:
    offset: float = 0.
    scale: float = 1.

    def apply(self, values: np.ndarray) -> np.ndarray:
        return (values - self.offset) * self.scale

    def invert(self, values: np.ndarray) -> np.ndarray:
        return values / self.scale + self.offset


@dataclass
class MwdImage:
    r: np.ndarray
    g: np.ndarray
    b: np.ndarray
    params: FringeParams
    valid: Optional[np.ndarray] = None

    @property
    def shape(self) -> Tuple[int, int]:
        return tuple(self.r.shape)  # type: ignore

    def stack(self) -> np.ndarray:
        return np.stack([self.r, self.g, self.b], axis=0)

    @classmethod
    def from_stack(
        cls,
        planes: np.ndarray,
        params: FringeParams,
        valid: Optional[np.ndarray] = None
    ) -> MwdImage:
        return cls(planes[0], planes[1], planes[2], params, valid)


@dataclass
class PhaseMap:
    wrapped: np.ndarray
    order: Optional[np.ndarray] = None
    unwrapped: Optional[np.ndarray] = field(default=None)


def prescale_depth(
    depth: DepthMap,
    period: float = DEFAULT_PERIOD,
    bits: int = DEFAULT_BITS
) -> Tuple[DepthMap, ScaleRecord]:
    """Affinely remap depth into a working range the b-bit fringe order resolves.

    The working depth starts at zero; it is only shrunk, never stretched.
    """
    if depth.valid_count == 0:
        raise AllInvalid("Depth map has no valid pixels")
    span = depth.z_max - depth.z_min
    bound = resolvable_span(period, bits)
    if span <= 0:
        record = ScaleRecord(offset=depth.z_min, scale=1.)
    elif span <= bound:
        record = ScaleRecord(offset=depth.z_min, scale=1.)
    else:
        record = ScaleRecord(offset=depth.z_min, scale=bound / span)
    working = record.apply(depth.values)
    working = np.clip(working, 0., bound if span > bound else max(span, 0.))
    working = np.where(depth.valid, working, 0.)
    if span <= 0:
        z_max = 0.
    else:
        z_max = float(working[depth.valid].max())
    _logger.debug(
        f"Prescale: span {span:.6g} -> {z_max:.6g}, offset {record.offset:.6g}, "
        f"scale {record.scale:.6g}"
    )
    return DepthMap(working, depth.valid.copy(), 0., z_max), record


def mwd_encode(
    depth: DepthMap, params: FringeParams, bits: int = DEFAULT_BITS
) -> MwdImage:
    if not params.resolvable(bits):
        raise RangeViolation(
            f"Working range {params.z_range:.6g} spans {params.periods:.4g} periods, "
            f"more than 2^{bits - 1} resolvable at {bits} bits"
        )
    shifted = depth.values - params.z_offset
    valid = depth.valid
    if valid.any():
        lo = float(shifted[valid].min())
        hi = float(shifted[valid].max())
        slack = params.z_range * RANGE_TOLERANCE
        if lo < -slack or hi > params.z_range + slack:
            raise RangeViolation(
                f"Depth [{lo:.6g}, {hi:.6g}] outside working range "
                f"[0, {params.z_range:.6g}]"
            )
    shifted = np.clip(np.where(valid, shifted, 0.), 0., params.z_range)
    theta = TWO_PI * shifted / params.period
    r = .5 * (1. + np.sin(theta))
    g = .5 * (1. + np.cos(theta))
    b = shifted / params.z_range
    r = np.where(valid, r, INVALID_CODEWORD[0])
    g = np.where(valid, g, INVALID_CODEWORD[1])
    b = np.where(valid, b, INVALID_CODEWORD[2])
    return MwdImage(r, g, b, params, valid.copy())


def wrapped_phase(image: MwdImage) -> PhaseMap:
    phi = np.arctan2(2. * image.r - 1., 2. * image.g - 1.)
    # atan2 yields -pi only for a negative-zero sine; fold into (-pi, pi]
    phi = np.where(phi <= -math.pi, math.pi, phi)
    return PhaseMap(wrapped=phi)


def _fractional_phase(phi: np.ndarray) -> np.ndarray:
    phi0 = np.where(phi >= 0, phi, phi + TWO_PI)
    return phi0 / TWO_PI


def fringe_order(image: MwdImage, phase: PhaseMap) -> PhaseMap:
    params = image.params
    coarse = image.b * params.z_range
    frac = _fractional_phase(phase.wrapped)
    order = round_half_away(coarse / params.period - frac)
    order = np.clip(order, 0, params.max_order).astype(np.int64)
    unwrapped = phase.wrapped + TWO_PI * order
    return PhaseMap(wrapped=phase.wrapped, order=order, unwrapped=unwrapped)


def working_depth(image: MwdImage) -> Tuple[np.ndarray, PhaseMap]:
    """Decoded depth relative to the working-range origin."""
    phase = fringe_order(image, wrapped_phase(image))
    frac = _fractional_phase(phase.wrapped)
    return image.params.period * (phase.order + frac), phase


def mwd_decode(
    image: MwdImage,
    params: Optional[FringeParams] = None,
    record: Optional[ScaleRecord] = None,
    valid: Optional[np.ndarray] = None,
) -> DepthMap:
    if params is not None and params != image.params:
        image = MwdImage(image.r, image.g, image.b, params, image.valid)
    if record is None:
        record = ScaleRecord()
    if valid is None:
        valid = image.valid if image.valid is not None else np.ones(image.shape, dtype=bool)
    shifted, _ = working_depth(image)
    values = record.invert(shifted + image.params.z_offset)
    values = np.where(valid, values, 0.)
    return DepthMap.from_values(values, valid)
