# -*- coding: utf-8 -*-
"""MWD decoding on tensors, differentiable through atan2.

The fringe order is piecewise constant, so it is computed on detached values
and enters the decoded depth as a constant.
"""
from __future__ import annotations
import math

import torch
from torch import Tensor

from typing import Tuple

from .network import round_half_away

TWO_PI = 2. * math.pi


def _per_sample(value, like: Tensor) -> Tensor:
    t = torch.as_tensor(value, dtype=like.dtype, device=like.device)
    if t.dim() == 0:
        return t
    return t.reshape(-1, 1, 1)


def decode_normalized(
    x_hat: Tensor, period, z_range
) -> Tuple[Tensor, Tensor]:
    """Working depth divided by z_range, and the detached fringe order.

    ``x_hat`` is (B, 3, H, W); ``period`` and ``z_range`` are scalars or
    per-sample values of shape (B,).
    """
    p = _per_sample(period, x_hat)
    zr = _per_sample(z_range, x_hat)
    r, g, b = x_hat[:, 0], x_hat[:, 1], x_hat[:, 2]
    phi = torch.atan2(2. * r - 1., 2. * g - 1.)
    phi0 = torch.where(phi >= 0, phi, phi + TWO_PI)
    frac = phi0 / TWO_PI
    with torch.no_grad():
        max_order = torch.ceil(zr / p)
        order = round_half_away(b * zr / p - frac)
        order = torch.minimum(torch.clamp(order, min=0.), max_order)
    depth = p * (order + frac)
    return depth / zr, order
