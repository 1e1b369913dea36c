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
from dataclasses import asdict, dataclass

import numpy as np

from typing import Any, Dict, Optional, Sequence

from ..exceptions import EmptyMask
from .constants import ORIGINAL_BPP

_logger = logging.getLogger("depthtcm.metrics")


@dataclass
class MetricsReport:
    """Distortion and rate of one decoded depth map.

    PSNR is taken on depth normalized by the ground-truth range, so it
    equals -20*log10(nrmse). ``accuracy`` is None when the range is zero.
    """
    psnr: float
    rmse: float
    nrmse: float
    accuracy: Optional[float]
    bpp: float
    cr: float
    valid_pixel_count: int

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


def psnr_from_nrmse(nrmse: float) -> float:
    if math.isnan(nrmse):
        return math.nan
    if nrmse == 0.:
        return math.inf
    return -20. * math.log10(nrmse)


def accuracy_from_nrmse(nrmse: float) -> Optional[float]:
    if math.isnan(nrmse):
        return None
    return (1. - nrmse) * 100.


def compute_metrics(
    truth: np.ndarray,
    decoded: np.ndarray,
    mask: np.ndarray,
    coded_bits: int,
    original_bits: Optional[int] = None,
) -> MetricsReport:
    truth = np.asarray(truth, dtype=np.float64)
    decoded = np.asarray(decoded, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    if truth.shape != decoded.shape or truth.shape != mask.shape:
        raise ValueError(
            f"Shape mismatch: truth {truth.shape}, decoded {decoded.shape}, mask {mask.shape}"
        )
    count = int(mask.sum())
    if count == 0:
        raise EmptyMask("No valid pixels to evaluate")
    if coded_bits <= 0:
        raise ValueError(f"coded_bits must be positive, got {coded_bits}")

    pixels = truth.size
    if original_bits is None:
        original_bits = ORIGINAL_BPP * pixels

    diff = decoded[mask] - truth[mask]
    rmse = float(np.sqrt(np.mean(diff * diff)))
    z_range = float(truth[mask].max() - truth[mask].min())
    if z_range > 0.:
        nrmse = rmse / z_range
    else:
        _logger.warning("Ground truth has zero depth range, NRMSE is undefined")
        nrmse = math.nan

    return MetricsReport(
        psnr=psnr_from_nrmse(nrmse),
        rmse=rmse,
        nrmse=nrmse,
        accuracy=accuracy_from_nrmse(nrmse),
        bpp=coded_bits / pixels,
        cr=original_bits / coded_bits,
        valid_pixel_count=count,
    )


def _mean(values: Sequence[float]) -> float:
    if any(math.isnan(v) for v in values):
        return math.nan
    if any(math.isinf(v) for v in values):
        return math.inf
    return math.fsum(values) / len(values)


def mean_report(reports: Sequence[MetricsReport]) -> MetricsReport:
    """Average reports in the given order; accuracy follows the mean NRMSE."""
    if not reports:
        raise ValueError("Cannot average an empty report list")
    nrmse = _mean([r.nrmse for r in reports])
    return MetricsReport(
        psnr=_mean([r.psnr for r in reports]),
        rmse=_mean([r.rmse for r in reports]),
        nrmse=nrmse,
        accuracy=accuracy_from_nrmse(nrmse),
        bpp=_mean([r.bpp for r in reports]),
        cr=_mean([r.cr for r in reports]),
        valid_pixel_count=sum(r.valid_pixel_count for r in reports),
    )
