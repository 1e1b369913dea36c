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
"""Self-describing depth container.

Fixed little-endian header followed by the payload sections::

    magic        4s   b"DTCM"
    version      u8
    codec_id     u8   0 = baseline, 1 = learned
    bits         u8 * 3 (r, g, b)
    flags        u8   bit 0 mask present, bit 1 adaptive quantization map
    width        u32
    height       u32
    z_offset     f64  depth subtracted before scaling
    z_range      f64  working range span
    prescale     f64  working depth per depth unit
    period       f64
    sections     u8   section count
    lengths      u64 * sections

A baseline container holds one block-coded section (mask, r, g, b, each
behind a u32 length) plus the quantization map when adaptive; learned
sections are mask, model digest, z, y.
"""
from __future__ import annotations
import logging
import struct
from dataclasses import dataclass, field

import numpy as np
import torch

from typing import TYPE_CHECKING, List, Optional, Tuple

from ..coding.baseline import (
    decode_mask,
    decode_planes_baseline,
    encode_mask,
    encode_planes_baseline,
)
from ..exceptions import (
    BadMagic,
    ConfigError,
    LengthMismatch,
    ModelMismatch,
    TruncatedStream,
    UnsupportedVersion,
)
from ..learned.checkpoint import model_digest
from ..learned.entropy import LatentStrings, compress, decompress
from ..learned.network import CodecModel
from ..transform.mwd import (
    DepthMap,
    FringeParams,
    ScaleRecord,
    mwd_decode,
    mwd_encode,
    prescale_depth,
)
from ..transform.quantizer import (
    QuantizedMwd,
    adaptive_quantize,
    dequantize_mwd,
    parse_quant_map,
    quantize_mwd,
    quantize_uniform,
    serialize_quant_map,
)
from .constants import (
    CODEC_BASELINE,
    CODEC_IDS,
    CODEC_LEARNED,
    CODEC_NAMES,
    CONTAINER_MAGIC,
    CONTAINER_VERSION,
    FLAG_ADAPTIVE,
    FLAG_MASK,
)

if TYPE_CHECKING:
    from ..settings import Settings

FIXED_HEADER = struct.Struct("<4sBBBBBBIIddddB")
SECTION_LENGTH = struct.Struct("<Q")

_logger = logging.getLogger("depthtcm.container")


@dataclass
class ContainerHeader:
    codec_id: int = CODEC_BASELINE
    bits: Tuple[int, int, int] = (4, 4, 4)
    flags: int = FLAG_MASK
    width: int = 0
    height: int = 0
    z_offset: float = 0.
    z_range: float = 8.
    prescale: float = 1.
    period: float = 8.
    sections: List[int] = field(default_factory=list)
    version: int = CONTAINER_VERSION

    @property
    def size(self) -> int:
        return FIXED_HEADER.size + SECTION_LENGTH.size * len(self.sections)

    @property
    def adaptive(self) -> bool:
        return bool(self.flags & FLAG_ADAPTIVE)

    @property
    def params(self) -> FringeParams:
        return FringeParams(period=self.period, z_offset=0., z_range=self.z_range)

    @property
    def record(self) -> ScaleRecord:
        return ScaleRecord(offset=self.z_offset, scale=self.prescale)


def serialize_header(header: ContainerHeader) -> bytes:
    out = FIXED_HEADER.pack(
        CONTAINER_MAGIC,
        header.version,
        header.codec_id,
        *header.bits,
        header.flags,
        header.width,
        header.height,
        header.z_offset,
        header.z_range,
        header.prescale,
        header.period,
        len(header.sections),
    )
    return out + b"".join(SECTION_LENGTH.pack(n) for n in header.sections)


def parse_header(data: bytes) -> ContainerHeader:
    if len(data) < FIXED_HEADER.size:
        raise TruncatedStream(
            f"Container header needs {FIXED_HEADER.size} bytes, got {len(data)}"
        )
    (magic, version, codec_id, bits_r, bits_g, bits_b, flags, width, height,
     z_offset, z_range, prescale, period, count) = FIXED_HEADER.unpack_from(data)
    if magic != CONTAINER_MAGIC:
        raise BadMagic(f"Not a depth container (magic {magic!r})")
    if version != CONTAINER_VERSION:
        raise UnsupportedVersion(f"Container version {version} is not supported")
    if codec_id not in CODEC_NAMES:
        raise LengthMismatch(f"Unknown codec id {codec_id}")
    end = FIXED_HEADER.size + SECTION_LENGTH.size * count
    if len(data) < end:
        raise TruncatedStream(f"Section table cut short: need {end} bytes, got {len(data)}")
    sections = [
        SECTION_LENGTH.unpack_from(data, FIXED_HEADER.size + SECTION_LENGTH.size * i)[0]
        for i in range(count)
    ]
    return ContainerHeader(
        codec_id=codec_id,
        bits=(bits_r, bits_g, bits_b),
        flags=flags,
        width=width,
        height=height,
        z_offset=z_offset,
        z_range=z_range,
        prescale=prescale,
        period=period,
        sections=sections,
        version=version,
    )


def parse_container(data: bytes) -> Tuple[ContainerHeader, List[bytes]]:
    header = parse_header(data)
    remaining = len(data) - header.size
    declared = sum(header.sections)
    if declared != remaining:
        raise LengthMismatch(
            f"Sections declare {declared} bytes but {remaining} follow the header"
        )
    payload = []
    pos = header.size
    for length in header.sections:
        payload.append(data[pos:pos + length])
        pos += length
    return header, payload


@dataclass
class CodecConfig:
    codec: str = "baseline"
    bits: int = 4
    period: float = 8.
    adaptive: bool = False
    patch_size: int = 16
    bit_lo: int = 2
    bit_hi: int = 6

    def __post_init__(self) -> None:
        if self.codec not in CODEC_IDS:
            raise ConfigError(f"Unknown codec {self.codec!r}, expected one of {sorted(CODEC_IDS)}")
        if self.adaptive and self.codec != "baseline":
            raise ConfigError("Adaptive quantization is only available with the baseline codec")

    @classmethod
    def from_settings(cls, settings: Settings) -> CodecConfig:
        return cls(
            codec=settings.get(["codec", "name"]),
            bits=settings.get_int(["codec", "bits"]),
            period=settings.get_float(["codec", "period"]),
            adaptive=settings.get_boolean(["codec", "adaptive"]),
            patch_size=settings.get_int(["codec", "patch_size"]),
            bit_lo=settings.get_int(["codec", "bit_lo"]),
            bit_hi=settings.get_int(["codec", "bit_hi"]),
        )


@dataclass
class DecodedFile:
    depth: DepthMap
    quantized: QuantizedMwd
    mask: np.ndarray
    header: ContainerHeader


def _require_model(model: Optional[CodecModel], config_bits: int) -> CodecModel:
    if model is None:
        raise ConfigError("The learned codec needs a model checkpoint")
    if model.bits != config_bits:
        raise ConfigError(
            f"Model was trained for {model.bits}-bit inputs, container uses {config_bits}"
        )
    return model


def _learned_planes(x_hat: torch.Tensor, bits: int) -> QuantizedMwd:
    planes = x_hat[0].detach().cpu().double().numpy()
    q = [quantize_uniform(planes[c], bits) for c in range(3)]
    return QuantizedMwd(q[0], q[1], q[2], bits, bits, bits)


def encode_file(
    depth: DepthMap,
    config: Optional[CodecConfig] = None,
    model: Optional[CodecModel] = None,
) -> bytes:
    """Prescale, MWD encode, quantize and entropy code one depth map."""
    config = config or CodecConfig()
    blue_bits = config.bits
    working, record = prescale_depth(depth, config.period, blue_bits)
    params = FringeParams.for_depth(working, config.period)
    image = mwd_encode(working, params, blue_bits)

    flags = FLAG_MASK
    if config.codec == "baseline":
        qmap = None
        if config.adaptive:
            quantized, qmap = adaptive_quantize(
                image, config.patch_size, config.bit_lo, config.bit_hi, blue_bits
            )
            flags |= FLAG_ADAPTIVE
        else:
            quantized = quantize_mwd(image, (config.bits,) * 3)
        sections = [encode_planes_baseline(quantized, depth.valid)]
        if qmap is not None:
            sections.append(serialize_quant_map(qmap))
        bits = quantized.bits
    else:
        model = _require_model(model, config.bits)
        quantized = quantize_mwd(image, (config.bits,) * 3)
        x = torch.from_numpy(dequantize_mwd(quantized, params).stack()).float()[None]
        strings, _, _ = compress(model, x)
        sections = [encode_mask(depth.valid), model_digest(model), strings.z, strings.y]
        bits = (config.bits,) * 3

    header = ContainerHeader(
        codec_id=CODEC_IDS[config.codec],
        bits=bits,
        flags=flags,
        width=depth.width,
        height=depth.height,
        z_offset=record.offset,
        z_range=params.z_range,
        prescale=record.scale,
        period=params.period,
        sections=[len(s) for s in sections],
    )
    data = serialize_header(header) + b"".join(sections)
    _logger.debug(
        f"Encoded {depth.width}x{depth.height} map with {config.codec} codec: "
        f"{len(data)} bytes ({8 * len(data) / depth.pixel_count:.4f} bpp)"
    )
    return data


def decode_file(data: bytes, model: Optional[CodecModel] = None) -> DecodedFile:
    header, sections = parse_container(data)
    shape = (header.height, header.width)
    if not header.flags & FLAG_MASK:
        raise LengthMismatch("Container carries no validity mask")

    if header.codec_id == CODEC_BASELINE:
        expected = 2 if header.adaptive else 1
        if len(sections) != expected:
            raise LengthMismatch(
                f"Baseline container needs {expected} sections, found {len(sections)}"
            )
        quantized, mask = decode_planes_baseline(sections[0], shape)
        quantized.params = header.params
        if header.adaptive:
            quantized.bit_map = parse_quant_map(sections[1], header.height, header.width)
    elif header.codec_id == CODEC_LEARNED:
        if len(sections) != 4:
            raise LengthMismatch(f"Learned container needs 4 sections, found {len(sections)}")
        mask = decode_mask(sections[0], shape)
        model = _require_model(model, header.bits[2])
        if sections[1] != model_digest(model):
            raise ModelMismatch("Container was written by a different model checkpoint")
        x_hat = decompress(model, LatentStrings(sections[3], sections[2], shape))
        quantized = _learned_planes(x_hat, header.bits[2])
        quantized.params = header.params
    else:
        raise LengthMismatch(f"Unknown codec id {header.codec_id}")

    image = dequantize_mwd(quantized, header.params, mask)
    depth = mwd_decode(image, header.params, header.record, mask)
    return DecodedFile(depth, quantized, mask, header)
