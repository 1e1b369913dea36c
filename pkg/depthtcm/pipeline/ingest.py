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
import pathlib
import struct

import numpy as np
from PIL import Image

from typing import List, Optional, Union

from ..exceptions import IoError, UnsupportedFormat
from ..transform.mwd import DepthMap, MwdImage
from ..transform.quantizer import quantize_uniform
from .constants import (
    DEFAULT_DEPTH_SCALE,
    DEFAULT_MASK_SENTINEL,
    PNG_SUFFIX,
    RAW_SUFFIX,
    SIDECAR_SUFFIX,
)

SIDECAR = struct.Struct("<IId")

PathLike = Union[str, pathlib.Path]

_logger = logging.getLogger("depthtcm.ingest")


def sidecar_path(path: PathLike) -> pathlib.Path:
    path = pathlib.Path(path)
    return path.with_name(path.name + SIDECAR_SUFFIX)


def detect_format(path: PathLike) -> str:
    suffix = pathlib.Path(path).suffix.lower()
    if suffix == PNG_SUFFIX:
        return "png"
    if suffix == RAW_SUFFIX:
        return "raw"
    raise UnsupportedFormat(f"Cannot tell the depth format of {path}")


def load_png16(
    path: PathLike,
    depth_scale: float = DEFAULT_DEPTH_SCALE,
    mask_sentinel: Optional[int] = DEFAULT_MASK_SENTINEL,
) -> DepthMap:
    try:
        with Image.open(path) as img:
            if img.mode not in ("I;16", "I;16B", "I;16L", "I", "L"):
                raise UnsupportedFormat(f"{path}: expected single-channel depth, got mode {img.mode}")
            raw = np.array(img).astype(np.int64)
    except OSError as e:
        raise IoError(f"Unable to read {path}: {e}") from e
    if raw.min(initial=0) < 0 or raw.max(initial=0) > 0xFFFF:
        raise UnsupportedFormat(f"{path}: values outside the 16-bit range")
    valid = np.ones(raw.shape, dtype=bool) if mask_sentinel is None else raw != mask_sentinel
    return DepthMap.from_values(raw * depth_scale, valid)


def save_png16(
    depth: DepthMap,
    path: PathLike,
    depth_scale: float = DEFAULT_DEPTH_SCALE,
    mask_sentinel: int = DEFAULT_MASK_SENTINEL,
) -> pathlib.Path:
    path = pathlib.Path(path)
    counts = np.rint(depth.values / depth_scale)
    counts = np.where(depth.valid, counts, mask_sentinel)
    if counts.min() < 0 or counts.max() > 0xFFFF:
        raise UnsupportedFormat(f"Depth does not fit 16-bit counts at scale {depth_scale}")
    try:
        Image.fromarray(counts.astype(np.uint16)).save(path)
    except OSError as e:
        raise IoError(f"Unable to write {path}: {e}") from e
    return path


def load_raw(path: PathLike) -> DepthMap:
    """Float32 little-endian plane with a sidecar; NaN marks invalid pixels."""
    path = pathlib.Path(path)
    try:
        header = sidecar_path(path).read_bytes()
        payload = path.read_bytes()
    except OSError as e:
        raise IoError(f"Unable to read {path}: {e}") from e
    if len(header) != SIDECAR.size:
        raise UnsupportedFormat(f"{sidecar_path(path)}: expected {SIDECAR.size} bytes")
    width, height, scale = SIDECAR.unpack(header)
    if len(payload) != 4 * width * height:
        raise UnsupportedFormat(
            f"{path}: {len(payload)} bytes for a {width}x{height} float32 plane"
        )
    values = np.frombuffer(payload, dtype="<f4").astype(np.float64).reshape(height, width)
    return DepthMap.from_values(values * scale)


def save_raw(depth: DepthMap, path: PathLike, scale: float = 1.) -> pathlib.Path:
    path = pathlib.Path(path)
    values = np.where(depth.valid, depth.values / scale, np.nan).astype("<f4")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(values.tobytes())
        sidecar_path(path).write_bytes(SIDECAR.pack(depth.width, depth.height, scale))
    except OSError as e:
        raise IoError(f"Unable to write {path}: {e}") from e
    return path


def load_depth(
    path: PathLike,
    fmt: str = "auto",
    depth_scale: float = DEFAULT_DEPTH_SCALE,
    mask_sentinel: Optional[int] = DEFAULT_MASK_SENTINEL,
) -> DepthMap:
    if fmt == "auto":
        fmt = detect_format(path)
    if fmt == "png":
        depth = load_png16(path, depth_scale, mask_sentinel)
    elif fmt == "raw":
        depth = load_raw(path)
    else:
        raise UnsupportedFormat(f"Unknown depth format {fmt!r}")
    _logger.debug(
        f"Loaded {path}: {depth.width}x{depth.height}, {depth.valid_count} valid, "
        f"range [{depth.z_min:.6g}, {depth.z_max:.6g}]"
    )
    return depth


def save_depth(depth: DepthMap, path: PathLike, depth_scale: float = DEFAULT_DEPTH_SCALE) -> pathlib.Path:
    if pathlib.Path(path).suffix.lower() == PNG_SUFFIX:
        return save_png16(depth, path, depth_scale)
    return save_raw(depth, path)


def list_corpus(directory: PathLike) -> List[pathlib.Path]:
    directory = pathlib.Path(directory)
    if not directory.is_dir():
        raise IoError(f"{directory} is not a directory")
    return sorted(
        p for p in directory.iterdir()
        if p.suffix.lower() in (PNG_SUFFIX, RAW_SUFFIX)
    )


def save_mwd_png(image: MwdImage, path: PathLike) -> pathlib.Path:
    """8-bit RGB view of an MWD image."""
    path = pathlib.Path(path)
    rgb = np.stack([quantize_uniform(c, 8) for c in (image.r, image.g, image.b)], axis=-1)
    try:
        Image.fromarray(rgb.astype(np.uint8)).save(path)
    except OSError as e:
        raise IoError(f"Unable to write {path}: {e}") from e
    return path
