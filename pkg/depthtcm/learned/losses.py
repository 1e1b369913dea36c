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
"""Rate-distortion objective.

Depths are compared in the normalized working domain (working depth divided
by z_range), so they live in [0, 1] like image intensities.
"""
from __future__ import annotations
import math
from dataclasses import dataclass, fields

import torch
from torch import Tensor

from typing import Dict, Optional

from ..exceptions import ConfigError, EmptyMask, NonFinite
from .constants import (
    DEFAULT_LAMBDA,
    DEFAULT_TAU,
    DEFAULT_W_IMG,
    DEFAULT_W_TV,
    DISTORTION_SCALE,
)


@dataclass(frozen=True)
class LossWeights:
    lmbda: float = DEFAULT_LAMBDA
    w_tv: float = DEFAULT_W_TV
    tau: float = DEFAULT_TAU
    w_img: float = DEFAULT_W_IMG

    def __post_init__(self) -> None:
        if not self.lmbda > 0:
            raise ConfigError(f"lambda must be positive, got {self.lmbda}")
        if not 0. < self.tau < 1.:
            raise ConfigError(f"tau must lie in (0, 1), got {self.tau}")
        if self.w_tv < 0 or self.w_img < 0:
            raise ConfigError("Loss term weights must be non-negative")


@dataclass
class LossParts:
    mse: Tensor
    bpp: Tensor
    conf: Tensor
    tv: Tensor
    img: Optional[Tensor] = None

    def as_floats(self) -> Dict[str, float]:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = 0. if value is None else float(value.detach())
        return out


def _valid(mask: Optional[Tensor], like: Tensor) -> Tensor:
    if mask is None:
        return torch.ones_like(like, dtype=torch.bool)
    return mask.to(torch.bool).expand_as(like)


def loss_mse(pred: Tensor, target: Tensor, mask: Optional[Tensor] = None) -> Tensor:
    valid = _valid(mask, pred)
    count = valid.sum()
    if count == 0:
        raise EmptyMask("No valid pixels to compute the distortion over")
    err = torch.where(valid, pred - target, torch.zeros_like(pred))
    return (err ** 2).sum() / count


def loss_conf(
    pred: Tensor,
    target: Tensor,
    mask: Optional[Tensor] = None,
    tau: float = DEFAULT_TAU,
) -> Tensor:
    """Squared error of the pixels whose error exceeds tau times the image's worst error.

    Each image gets its own threshold; the sum is divided by every valid
    pixel of that image. Leading dimensions are images.
    """
    valid = _valid(mask, pred)
    if valid.sum() == 0:
        raise EmptyMask("No valid pixels to compute the confidence loss over")
    err = torch.where(valid, pred - target, torch.zeros_like(pred))
    if err.dim() < 2:
        err = err.reshape(1, -1)
        valid = valid.reshape(1, -1)
    else:
        err = err.reshape(-1, err.shape[-2] * err.shape[-1])
        valid = valid.reshape(-1, valid.shape[-2] * valid.shape[-1])
    total = err.new_zeros(())
    images = 0
    for e, v in zip(err, valid):
        count = v.sum()
        if count == 0:
            continue
        magnitude = e.abs()
        threshold = tau * magnitude.detach().max()
        selected = (magnitude.detach() > threshold) & v
        total = total + torch.where(selected, e ** 2, torch.zeros_like(e)).sum() / count
        images += 1
    return total / images


def loss_tv(pred: Tensor) -> Tensor:
    """Sum of forward-difference gradient magnitudes over pixels with both neighbours."""
    if pred.shape[-1] < 2 or pred.shape[-2] < 2:
        raise ValueError(f"Total variation needs H, W >= 2, got {tuple(pred.shape[-2:])}")
    dy = pred[..., 1:, :-1] - pred[..., :-1, :-1]
    dx = pred[..., :-1, 1:] - pred[..., :-1, :-1]
    sq = dx ** 2 + dy ** 2
    nonzero = sq > 0
    # zero-gradient pixels contribute 0 with a zero (not NaN) derivative
    safe = torch.sqrt(torch.where(nonzero, sq, torch.ones_like(sq)))
    tv = torch.where(nonzero, safe, torch.zeros_like(sq))
    if tv.dim() > 2:
        return tv.reshape(-1, tv.shape[-2] * tv.shape[-1]).sum(dim=1).mean()
    return tv.sum()


def loss_bpp(likelihoods_y: Tensor, likelihoods_z: Tensor, pixel_count: int) -> Tensor:
    """Mean bits per original depth pixel implied by the latent likelihoods."""
    batch = likelihoods_y.shape[0] if likelihoods_y.dim() > 0 else 1
    bits = -torch.log2(likelihoods_y).sum() - torch.log2(likelihoods_z).sum()
    return bits / (batch * pixel_count)


def loss_total(parts: LossParts, weights: LossWeights) -> Tensor:
    distortion = parts.mse
    if parts.img is not None and weights.w_img:
        distortion = distortion + weights.w_img * parts.img
    total = (
        weights.lmbda * DISTORTION_SCALE * distortion
        + parts.bpp
        + parts.conf
        + weights.w_tv * parts.tv
    )
    if not math.isfinite(float(total.detach())):
        raise NonFinite(f"Non-finite loss: {parts.as_floats()}")
    return total
