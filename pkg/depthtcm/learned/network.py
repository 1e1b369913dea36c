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
"""Transformer-CNN mixture codec at desk scale.

``g_a`` maps a 3-channel MWD image to the latent ``y`` at stride 16, ``h_a``
derives the side latent ``z`` at a further stride 4, ``h_s`` turns the
quantized side latent into per-element Gaussian means and scales for ``y``,
and ``g_s`` mirrors ``g_a`` back to an MWD image.
"""
from __future__ import annotations
import logging
from dataclasses import dataclass

import torch
import torch.nn as nn
import torch.nn.functional as F
from einops import rearrange
from torch import Tensor

from typing import Optional, Tuple

from ..exceptions import CodecError, OddChannels
from ..transform.quantizer import quantize_train_proxy
from .constants import (
    BACKBONES,
    FEATURES,
    HEAD_DIM,
    HYPER_CHANNELS,
    LATENT_CHANNELS,
    LATTICE_BOUND,
    MODES,
    PAD_MULTIPLE,
    SCALE_FLOOR,
    WINDOW_SIZE,
)
from .entropy import likelihood_y, likelihood_z


def conv(in_channels: int, out_channels: int, kernel_size: int = 5, stride: int = 2) -> nn.Module:
    return nn.Conv2d(
        in_channels,
        out_channels,
        kernel_size=kernel_size,
        stride=stride,
        padding=kernel_size // 2,
    )


def deconv(in_channels: int, out_channels: int, kernel_size: int = 5, stride: int = 2) -> nn.Module:
    return nn.ConvTranspose2d(
        in_channels,
        out_channels,
        kernel_size=kernel_size,
        stride=stride,
        output_padding=stride - 1,
        padding=kernel_size // 2,
    )


def round_half_away(x: Tensor) -> Tensor:
    return torch.sign(x) * torch.floor(torch.abs(x) + .5)


def ste_round(x: Tensor) -> Tensor:
    return round_half_away(x) - x.detach() + x


class WindowAttention(nn.Module):
    """Multi-head self-attention inside non-overlapping windows, channels last."""

    def __init__(self, dim: int, head_dim: int, window_size: int) -> None:
        super().__init__()
        if dim % head_dim:
            head_dim = dim
        self.dim = dim
        self.head_dim = head_dim
        self.n_heads = dim // head_dim
        self.scale = head_dim ** -0.5
        self.window_size = window_size
        self.qkv = nn.Linear(dim, 3 * dim, bias=True)
        self.proj = nn.Linear(dim, dim)
        self.relative_position_params = nn.Parameter(
            torch.zeros(self.n_heads, 2 * window_size - 1, 2 * window_size - 1)
        )
        nn.init.trunc_normal_(self.relative_position_params, std=.02)

    def relative_embedding(self, p: int) -> Tensor:
        idx = torch.arange(p, device=self.relative_position_params.device)
        cord = torch.stack(torch.meshgrid(idx, idx, indexing="ij"), dim=-1).reshape(-1, 2)
        relation = cord[:, None, :] - cord[None, :, :] + self.window_size - 1
        return self.relative_position_params[:, relation[:, :, 0], relation[:, :, 1]]

    def forward(self, x: Tensor) -> Tuple[Tensor, Tensor]:
        _, h, w, _ = x.shape
        p = min(self.window_size, h, w)
        pad_h = (-h) % p
        pad_w = (-w) % p
        if pad_h or pad_w:
            x = F.pad(x, (0, 0, 0, pad_w, 0, pad_h))
        rows = x.shape[1] // p
        x = rearrange(x, "b (w1 p1) (w2 p2) c -> b (w1 w2) (p1 p2) c", p1=p, p2=p)
        qkv = self.qkv(x)
        q, k, v = rearrange(
            qkv, "b nw np (three h c) -> three h b nw np c", three=3, c=self.head_dim
        )
        sim = torch.einsum("hbwpc,hbwqc->hbwpq", q, k) * self.scale
        sim = sim + rearrange(self.relative_embedding(p), "h p q -> h 1 1 p q")
        probs = torch.softmax(sim, dim=-1)
        out = torch.einsum("hbwij,hbwjc->hbwic", probs, v)
        out = rearrange(out, "h b w p c -> b w p (h c)")
        out = self.proj(out)
        out = rearrange(out, "b (w1 w2) (p1 p2) c -> b (w1 p1) (w2 p2) c", w1=rows, p1=p, p2=p)
        return out[:, :h, :w, :], probs


def _conv_branch(channels: int) -> nn.Module:
    return nn.Sequential(
        conv(channels, channels, kernel_size=3, stride=1),
        nn.GELU(),
        conv(channels, channels, kernel_size=3, stride=1),
    )


class TcmBlock(nn.Module):
    """Half the channels through a residual conv branch, half through window attention.

    The ``cnn`` backbone swaps the attention half for a second conv branch.
    """

    def __init__(
        self,
        channels: int,
        head_dim: int = HEAD_DIM,
        window_size: int = WINDOW_SIZE,
        backbone: str = "tcm",
    ) -> None:
        super().__init__()
        if channels % 2:
            raise OddChannels(f"TCM block needs an even channel count, got {channels}")
        if backbone not in BACKBONES:
            raise CodecError(f"Unknown backbone {backbone!r}, expected one of {BACKBONES}")
        self.half = channels // 2
        self.backbone = backbone
        self.conv_branch = _conv_branch(self.half)
        if backbone == "tcm":
            self.attn_norm = nn.LayerNorm(self.half)
            self.attention = WindowAttention(self.half, head_dim, window_size)
        else:
            self.second_branch = _conv_branch(self.half)
        self.fuse = nn.Conv2d(channels, channels, kernel_size=1)

    def forward(self, x: Tensor, return_attention: bool = False):
        conv_x, trans_x = torch.split(x, (self.half, self.half), dim=1)
        conv_x = conv_x + self.conv_branch(conv_x)
        probs = None
        if self.backbone == "tcm":
            t = rearrange(trans_x, "b c h w -> b h w c")
            attended, probs = self.attention(self.attn_norm(t))
            trans_x = trans_x + rearrange(attended, "b h w c -> b c h w")
        else:
            trans_x = trans_x + self.second_branch(trans_x)
        out = self.fuse(torch.cat((conv_x, trans_x), dim=1))
        if return_attention:
            return out, probs
        return out


@dataclass
class HyperOutput:
    z: Tensor
    z_hat: Tensor
    mu: Tensor
    sigma: Tensor
    likelihoods_z: Tensor


@dataclass
class CodecOutput:
    x_hat: Tensor
    y: Tensor
    y_hat: Tensor
    z: Tensor
    z_hat: Tensor
    mu: Tensor
    sigma: Tensor
    likelihoods_y: Tensor
    likelihoods_z: Tensor
    pad: Tuple[int, int]


class CodecModel(nn.Module):

    def __init__(
        self,
        features: int = FEATURES,
        latent_channels: int = LATENT_CHANNELS,
        hyper_channels: int = HYPER_CHANNELS,
        window_size: int = WINDOW_SIZE,
        head_dim: int = HEAD_DIM,
        backbone: str = "tcm",
        bits: int = 4,
    ) -> None:
        super().__init__()
        self.features = features
        self.latent_channels = latent_channels
        self.hyper_channels = hyper_channels
        self.window_size = window_size
        self.head_dim = head_dim
        self.backbone = backbone
        self.bits = bits
        self._logger = logging.getLogger("depthtcm.learned")

        def block() -> nn.Module:
            return TcmBlock(features, head_dim, window_size, backbone)

        self.g_a = nn.Sequential(
            conv(3, features),
            block(),
            conv(features, features),
            block(),
            conv(features, features),
            block(),
            conv(features, latent_channels),
        )
        self.g_s = nn.Sequential(
            deconv(latent_channels, features),
            block(),
            deconv(features, features),
            block(),
            deconv(features, features),
            block(),
            deconv(features, 3),
        )
        self.h_a = nn.Sequential(
            conv(latent_channels, features, kernel_size=3, stride=1),
            nn.GELU(),
            conv(features, features),
            nn.GELU(),
            conv(features, hyper_channels),
        )
        self.h_s = nn.Sequential(
            deconv(hyper_channels, features),
            nn.GELU(),
            deconv(features, features),
            nn.GELU(),
            conv(features, 2 * latent_channels, kernel_size=3, stride=1),
        )
        # factorized Gaussian prior per side-latent channel
        self.z_loc = nn.Parameter(torch.zeros(hyper_channels))
        self.z_log_scale = nn.Parameter(torch.zeros(hyper_channels))

    def describe(self) -> str:
        count = sum(p.numel() for p in self.parameters())
        return (
            f"{self.backbone} codec N={self.features} C_y={self.latent_channels} "
            f"C_z={self.hyper_channels} window={self.window_size} bits={self.bits} "
            f"({count} parameters)"
        )

    @staticmethod
    def pad(x: Tensor) -> Tuple[Tensor, Tuple[int, int]]:
        h, w = x.shape[-2:]
        pad_h = (-h) % PAD_MULTIPLE
        pad_w = (-w) % PAD_MULTIPLE
        if pad_h or pad_w:
            x = F.pad(x, (0, pad_w, 0, pad_h), mode="replicate")
        return x, (pad_h, pad_w)

    def analysis(self, x: Tensor) -> Tensor:
        padded, _ = self.pad(x)
        return self.g_a(padded)

    def synthesis(self, y_hat: Tensor, size: Optional[Tuple[int, int]] = None) -> Tensor:
        x_hat = self.g_s(y_hat)
        if size is not None:
            x_hat = x_hat[..., :size[0], :size[1]]
        return x_hat

    def z_prior(self) -> Tuple[Tensor, Tensor]:
        loc = self.z_loc.view(1, -1, 1, 1)
        scale = torch.exp(self.z_log_scale).clamp_min(SCALE_FLOOR).view(1, -1, 1, 1)
        return loc, scale

    def _quantize(
        self, t: Tensor, mode: str, generator: Optional[torch.Generator]
    ) -> Tuple[Tensor, Tensor]:
        """Latent for the likelihood and latent for the decoder."""
        if mode == "eval":
            hard = round_half_away(t).clamp(-LATTICE_BOUND, LATTICE_BOUND)
            return hard, hard
        noise = torch.rand(t.shape, generator=generator, dtype=t.dtype, device=t.device) - .5
        noisy = t + noise
        if mode == "noise":
            return noisy, noisy
        return noisy, ste_round(t)

    def gaussian_params(self, z_hat: Tensor) -> Tuple[Tensor, Tensor]:
        mu, raw_scale = self.h_s(z_hat).chunk(2, dim=1)
        sigma = F.softplus(raw_scale).clamp_min(SCALE_FLOOR)
        return mu, sigma

    def hyper_path(
        self,
        y: Tensor,
        mode: str = "eval",
        generator: Optional[torch.Generator] = None,
    ) -> HyperOutput:
        z = self.h_a(y)
        z_for_rate, z_hat = self._quantize(z, mode, generator)
        mu, sigma = self.gaussian_params(z_hat)
        loc, scale = self.z_prior()
        return HyperOutput(z, z_hat, mu, sigma, likelihood_z(z_for_rate, loc, scale))

    def snap_output(self, x_hat: Tensor, mode: str) -> Tensor:
        if mode == "train":
            return quantize_train_proxy(x_hat, self.bits, "ste")
        if mode == "eval":
            with torch.no_grad():
                return quantize_train_proxy(x_hat, self.bits, "ste")
        return x_hat

    def forward(
        self,
        x: Tensor,
        mode: str = "eval",
        generator: Optional[torch.Generator] = None,
    ) -> CodecOutput:
        if mode not in MODES:
            raise CodecError(f"Unknown forward mode {mode!r}, expected one of {MODES}")
        size = tuple(x.shape[-2:])
        padded, pad = self.pad(x)
        y = self.g_a(padded)
        hyper = self.hyper_path(y, mode, generator)
        y_for_rate, y_hat = self._quantize(y, mode, generator)
        likelihoods_y = likelihood_y(y_for_rate, hyper.mu, hyper.sigma)
        x_hat = self.snap_output(self.synthesis(y_hat, size), mode)
        return CodecOutput(
            x_hat=x_hat,
            y=y,
            y_hat=y_hat,
            z=hyper.z,
            z_hat=hyper.z_hat,
            mu=hyper.mu,
            sigma=hyper.sigma,
            likelihoods_y=likelihoods_y,
            likelihoods_z=hyper.likelihoods_z,
            pad=pad,
        )
