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
"""Lossless predictive coder for quantized MWD planes.

Each plane is predicted from its left neighbour (top neighbour in the first
column), the modular residual is range coded under an adaptive order-0 model.
The validity mask is run-length coded ahead of the planes.
"""
from __future__ import annotations
import logging
import struct

import numpy as np

from typing import List, Optional, Tuple

from ..exceptions import LengthMismatch, TruncatedStream
from ..transform.quantizer import QuantizedMwd
from .constants import RUN_EXPONENTS
from .rangecoder import (
    AdaptiveFrequencyModel,
    CdfTable,
    RangeDecoder,
    RangeEncoder,
    SymbolStream,
    range_decode,
    range_encode,
)

PLANE_HEADER = struct.Struct("<IB")
MASK_HEADER = struct.Struct("<I")
BLOCK_LENGTH = struct.Struct("<I")

_logger = logging.getLogger("depthtcm.coding")


def predict_residuals(plane: np.ndarray, bits: int) -> np.ndarray:
    plane = np.asarray(plane, dtype=np.int64)
    modulus = 1 << bits
    pred = np.zeros_like(plane)
    pred[:, 1:] = plane[:, :-1]
    pred[1:, 0] = plane[:-1, 0]
    return (plane - pred) % modulus


def reconstruct_plane(residuals: np.ndarray, bits: int) -> np.ndarray:
    modulus = 1 << bits
    first = np.cumsum(residuals[:, 0]) % modulus
    rows = residuals.copy()
    rows[:, 0] = first
    return np.cumsum(rows, axis=1) % modulus


def encode_plane(plane: np.ndarray, bits: int) -> bytes:
    residuals = predict_residuals(plane, bits)
    stream = SymbolStream(residuals.ravel(), 1 << bits)
    payload = range_encode(stream, AdaptiveFrequencyModel(1 << bits))
    return PLANE_HEADER.pack(len(stream), bits) + payload


def decode_plane(data: bytes, shape: Tuple[int, int]) -> Tuple[np.ndarray, int]:
    if len(data) < PLANE_HEADER.size:
        raise TruncatedStream("Plane block shorter than its header")
    count, bits = PLANE_HEADER.unpack_from(data)
    if count != shape[0] * shape[1]:
        raise LengthMismatch(
            f"Plane holds {count} symbols, expected {shape[0]}x{shape[1]}"
        )
    stream = range_decode(
        data[PLANE_HEADER.size:], AdaptiveFrequencyModel(1 << bits), count, 1 << bits
    )
    return reconstruct_plane(stream.symbols.reshape(shape), bits), bits


def mask_runs(mask: np.ndarray) -> Tuple[int, np.ndarray]:
    flat = np.asarray(mask, dtype=bool).ravel()
    if flat.size == 0:
        return 0, np.zeros(0, dtype=np.int64)
    edges = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    bounds = np.concatenate([[0], edges, [flat.size]])
    return int(flat[0]), np.diff(bounds)


def encode_mask(mask: np.ndarray) -> bytes:
    first, runs = mask_runs(mask)
    encoder = RangeEncoder()
    if runs.size:
        encoder.encode_symbol(CdfTable.uniform(2), first)
        exponents = AdaptiveFrequencyModel(RUN_EXPONENTS)
        for run in runs.tolist():
            e = run.bit_length()
            encoder.encode_symbol(exponents, e)
            encoder.encode_bits(run - (1 << (e - 1)), e - 1)
    return MASK_HEADER.pack(int(np.asarray(mask).size)) + encoder.finish()


def decode_mask(data: bytes, shape: Tuple[int, int]) -> np.ndarray:
    if len(data) < MASK_HEADER.size:
        raise TruncatedStream("Mask block shorter than its header")
    (count,) = MASK_HEADER.unpack_from(data)
    if count != shape[0] * shape[1]:
        raise LengthMismatch(f"Mask covers {count} pixels, expected {shape[0]}x{shape[1]}")
    flat = np.zeros(count, dtype=bool)
    if count == 0:
        return flat.reshape(shape)
    decoder = RangeDecoder(data[MASK_HEADER.size:])
    value = bool(decoder.decode_symbol(CdfTable.uniform(2)))
    exponents = AdaptiveFrequencyModel(RUN_EXPONENTS)
    pos = 0
    while pos < count:
        e = decoder.decode_symbol(exponents)
        if e == 0:
            raise LengthMismatch("Zero-length run in mask stream")
        run = (1 << (e - 1)) + decoder.decode_bits(e - 1)
        if pos + run > count:
            raise LengthMismatch(f"Mask runs overflow {count} pixels")
        flat[pos:pos + run] = value
        pos += run
        value = not value
    return flat.reshape(shape)


def baseline_sections(quantized: QuantizedMwd, mask: np.ndarray) -> List[bytes]:
    """Mask block followed by the r, g and b plane blocks."""
    quantized.validate()
    sections = [encode_mask(mask)]
    for plane, bits in quantized.planes():
        sections.append(encode_plane(plane, bits))
    _logger.debug(
        "Baseline sections: " + ", ".join(str(len(s)) for s in sections) + " bytes"
    )
    return sections


def encode_planes_baseline(quantized: QuantizedMwd, mask: np.ndarray) -> bytes:
    return b"".join(
        BLOCK_LENGTH.pack(len(section)) + section
        for section in baseline_sections(quantized, mask)
    )


def split_blocks(data: bytes, expected: Optional[int] = None) -> List[bytes]:
    blocks = []
    pos = 0
    while pos < len(data):
        if pos + BLOCK_LENGTH.size > len(data):
            raise TruncatedStream("Block length prefix cut short")
        (length,) = BLOCK_LENGTH.unpack_from(data, pos)
        pos += BLOCK_LENGTH.size
        if pos + length > len(data):
            raise TruncatedStream(f"Block of {length} bytes runs past the stream end")
        blocks.append(data[pos:pos + length])
        pos += length
    if expected is not None and len(blocks) != expected:
        raise LengthMismatch(f"Expected {expected} blocks, found {len(blocks)}")
    return blocks


def decode_sections_baseline(
    sections: List[bytes],
    shape: Tuple[int, int],
) -> Tuple[List[Tuple[np.ndarray, int]], np.ndarray]:
    mask = decode_mask(sections[0], shape)
    planes = [decode_plane(section, shape) for section in sections[1:]]
    return planes, mask


def decode_planes_baseline(
    data: bytes, shape: Tuple[int, int]
) -> Tuple[QuantizedMwd, np.ndarray]:
    planes, mask = decode_sections_baseline(split_blocks(data, 4), shape)
    (r, bits_r), (g, bits_g), (b, bits_b) = planes
    return QuantizedMwd(r, g, b, bits_r, bits_g, bits_b), mask
