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
"""Gaussian entropy model for the latents and its bridge to the range coder."""
from __future__ import annotations
import logging
from dataclasses import dataclass

import numpy as np
import torch
from torch import Tensor

from typing import TYPE_CHECKING, List, Tuple

from ..coding.constants import LIKELIHOOD_FLOOR
from ..coding.rangecoder import (
    CdfTable,
    RangeDecoder,
    RangeEncoder,
    probabilities_to_cdf,
)
from ..coding.rate import estimate_bpp
from .constants import LATENT_STRIDE, LATTICE_BOUND, PAD_MULTIPLE, TAIL_SIGMAS

if TYPE_CHECKING:
    from .network import CodecModel

_logger = logging.getLogger("depthtcm.learned")


def standardized_cumulative(x: Tensor) -> Tensor:
    # erfc keeps precision in the far tails
    return .5 * torch.erfc(-(2 ** -0.5) * x)


def _interval_probability(values: Tensor, loc: Tensor, scale: Tensor) -> Tensor:
    v = torch.abs(values - loc)
    upper = standardized_cumulative((.5 - v) / scale)
    lower = standardized_cumulative((-.5 - v) / scale)
    return upper - lower


def likelihood_y(y_hat: Tensor, mu: Tensor, sigma: Tensor) -> Tensor:
    return _interval_probability(y_hat, mu, sigma).clamp_min(LIKELIHOOD_FLOOR)


def likelihood_z(z_hat: Tensor, loc: Tensor, scale: Tensor) -> Tensor:
    return _interval_probability(z_hat, loc, scale).clamp_min(LIKELIHOOD_FLOOR)


def lattice_symbols() -> np.ndarray:
    return np.arange(-LATTICE_BOUND, LATTICE_BOUND + 1, dtype=np.int64)


def gaussian_tables(loc: Tensor, scale: Tensor) -> List[CdfTable]:
    """One 16-bit table per element over the latent lattice.

    Mass outside loc +- TAIL_SIGMAS * scale is dropped before the table gets
    its per-symbol floor count.
    """
    loc = loc.detach().to(torch.float64).reshape(-1, 1)
    scale = scale.detach().to(torch.float64).reshape(-1, 1)
    symbols = torch.from_numpy(lattice_symbols().astype(np.float64)).reshape(1, -1)
    probs = _interval_probability(symbols, loc, scale)
    lo = torch.floor(loc - TAIL_SIGMAS * scale)
    hi = torch.ceil(loc + TAIL_SIGMAS * scale)
    clipped = torch.where((symbols >= lo) & (symbols <= hi), probs, torch.zeros_like(probs))
    empty = clipped.sum(dim=1, keepdim=True) <= 0
    clipped = torch.where(empty, torch.ones_like(clipped), clipped)
    cdf = probabilities_to_cdf(clipped.numpy())
    return [CdfTable(row) for row in cdf]


def latent_shapes(model: CodecModel, size: Tuple[int, int]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    h = -(-size[0] // PAD_MULTIPLE) * PAD_MULTIPLE
    w = -(-size[1] // PAD_MULTIPLE) * PAD_MULTIPLE
    y_shape = (1, model.latent_channels, h // LATENT_STRIDE, w // LATENT_STRIDE)
    z_shape = (1, model.hyper_channels, h // PAD_MULTIPLE, w // PAD_MULTIPLE)
    return y_shape, z_shape


@dataclass
class LatentStrings:
    y: bytes
    z: bytes
    size: Tuple[int, int]
    # table-implied rate of the coded symbols; 0 when the strings were parsed
    estimated_bpp: float = 0.


def _encode(values: Tensor, tables: List[CdfTable]) -> bytes:
    encoder = RangeEncoder()
    for symbol, table in zip((values.reshape(-1).to(torch.int64) + LATTICE_BOUND).tolist(), tables):
        encoder.encode_symbol(table, symbol)
    return encoder.finish()


def _table_likelihoods(values: Tensor, tables: List[CdfTable]) -> np.ndarray:
    symbols = (values.reshape(-1).to(torch.int64) + LATTICE_BOUND).tolist()
    return np.array([table.probability(s) for s, table in zip(symbols, tables)])


def _decode(data: bytes, tables: List[CdfTable], shape: Tuple[int, ...]) -> Tensor:
    decoder = RangeDecoder(data)
    symbols = [decoder.decode_symbol(table) - LATTICE_BOUND for table in tables]
    return torch.tensor(symbols, dtype=torch.float32).reshape(shape)


def _prior_tables(model: CodecModel, shape: Tuple[int, ...]) -> List[CdfTable]:
    loc, scale = model.z_prior()
    return gaussian_tables(loc.expand(shape), scale.expand(shape))


@torch.no_grad()
def compress(model: CodecModel, x: Tensor) -> Tuple[LatentStrings, Tensor, Tensor]:
    """Code one image (1x3xHxW); returns the strings plus the coded y_hat and z_hat."""
    if x.dim() != 4 or x.shape[0] != 1:
        raise ValueError(f"compress expects a single 1x3xHxW image, got {tuple(x.shape)}")
    model.eval()
    size = (int(x.shape[-2]), int(x.shape[-1]))
    y = model.analysis(x)
    hyper = model.hyper_path(y, "eval")
    z_tables = _prior_tables(model, tuple(hyper.z_hat.shape))
    z_bytes = _encode(hyper.z_hat, z_tables)
    y_hat = model._quantize(y, "eval", None)[1]
    y_tables = gaussian_tables(hyper.mu, hyper.sigma)
    y_bytes = _encode(y_hat, y_tables)
    estimated = estimate_bpp(_table_likelihoods(y_hat, y_tables),
                             _table_likelihoods(hyper.z_hat, z_tables), size[0] * size[1])
    strings = LatentStrings(y_bytes, z_bytes, size, estimated)
    _logger.debug(
        f"Latents coded: y {len(y_bytes)} bytes, z {len(z_bytes)} bytes, "
        f"{bits_per_pixel(strings):.4f} bpp against {estimated:.4f} estimated"
    )
    return strings, y_hat, hyper.z_hat


@torch.no_grad()
def decompress_latents(model: CodecModel, strings: LatentStrings) -> Tuple[Tensor, Tensor]:
    model.eval()
    y_shape, z_shape = latent_shapes(model, strings.size)
    z_hat = _decode(strings.z, _prior_tables(model, z_shape), z_shape)
    mu, sigma = model.gaussian_params(z_hat)
    y_hat = _decode(strings.y, gaussian_tables(mu, sigma), y_shape)
    return y_hat, z_hat


@torch.no_grad()
def decompress(model: CodecModel, strings: LatentStrings) -> Tensor:
    y_hat, _ = decompress_latents(model, strings)
    return model.snap_output(model.synthesis(y_hat, strings.size), "eval")


def latent_bits(strings: LatentStrings) -> int:
    return 8 * (len(strings.y) + len(strings.z))


def ideal_bits(likelihoods: Tensor) -> float:
    return float(-torch.log2(likelihoods.detach().double()).sum())


def bits_per_pixel(strings: LatentStrings) -> float:
    return latent_bits(strings) / float(strings.size[0] * strings.size[1])
