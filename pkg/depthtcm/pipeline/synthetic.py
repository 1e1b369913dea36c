# -*- coding: utf-8 -*-
"""Seed-deterministic piecewise-smooth depth maps.

Each map is a tilted background plane with a handful of nearer plane or
quadric patches pasted over it; the nearest surface wins, which leaves
sharp occlusion steps along the patch outlines.
"""
from __future__ import annotations
import logging
import pathlib

import numpy as np

from typing import List, Optional, Tuple, Union

from ..exceptions import ConfigError, IoError
from ..transform.mwd import DepthMap
from .constants import (
    EDGE_BAND,
    EDGE_THRESHOLD,
    RAW_SUFFIX,
    SYNTHETIC_FAR,
    SYNTHETIC_NEAR,
    SYNTHETIC_RETRIES,
)
from .ingest import save_raw

_logger = logging.getLogger("depthtcm.synthetic")


def edge_fraction(values: np.ndarray, threshold: float) -> float:
    """Share of pixels whose gradient magnitude exceeds ``threshold``."""
    if min(values.shape) < 2:
        return 0.
    gy, gx = np.gradient(values)
    return float((np.hypot(gx, gy) > threshold).mean())


def _patch(
    rng: np.random.Generator, yy: np.ndarray, xx: np.ndarray, near: float, span: float
) -> Tuple[np.ndarray, np.ndarray]:
    cy, cx = rng.uniform(0.15, 0.85, size=2)
    ry, rx = rng.uniform(0.08, 0.25, size=2)
    if rng.random() < 0.5:
        inside = ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 <= 1.
    else:
        inside = (np.abs(yy - cy) <= ry) & (np.abs(xx - cx) <= rx)
    level = near + span * rng.uniform(0.05, 0.35)
    gx, gy = rng.uniform(-0.1, 0.1, size=2)
    curvature = rng.uniform(-0.15, 0.15) if rng.random() < 0.5 else 0.
    dy, dx = yy - cy, xx - cx
    surface = level + span * (gx * dx + gy * dy + curvature * (dx * dx + dy * dy))
    return inside, surface


def _render(
    rng: np.random.Generator, height: int, width: int, near: float, far: float
) -> np.ndarray:
    span = far - near
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    yy /= max(height - 1, 1)
    xx /= max(width - 1, 1)
    tilt_x, tilt_y = rng.uniform(-0.1, 0.1, size=2)
    depth = near + span * (rng.uniform(0.6, 0.8) + tilt_x * (xx - 0.5) + tilt_y * (yy - 0.5))
    for _ in range(int(rng.integers(2, 7))):
        inside, surface = _patch(rng, yy, xx, near, span)
        depth = np.where(inside, np.minimum(depth, surface), depth)
    return np.clip(depth, near, far)


def synthetic_depth(
    rng: np.random.Generator,
    height: int = 128,
    width: int = 128,
    valid_fraction: float = 1.,
    near: float = SYNTHETIC_NEAR,
    far: float = SYNTHETIC_FAR,
    edge_band: Tuple[float, float] = EDGE_BAND,
) -> DepthMap:
    if height < 1 or width < 1:
        raise ConfigError(f"Synthetic maps need positive dimensions, got {height}x{width}")
    if not 0. < valid_fraction <= 1.:
        raise ConfigError(f"valid_fraction must lie in (0, 1], got {valid_fraction}")
    if not 0. <= near < far:
        raise ConfigError(f"Expected 0 <= near < far, got near={near}, far={far}")

    threshold = EDGE_THRESHOLD * (far - near)
    lo, hi = edge_band
    for attempt in range(SYNTHETIC_RETRIES):
        values = _render(rng, height, width, near, far)
        fraction = edge_fraction(values, threshold)
        if lo <= fraction <= hi:
            break
        _logger.debug(f"Edge fraction {fraction:.4f} outside [{lo}, {hi}], redrawing ({attempt + 1})")
    else:
        _logger.warning(
            f"Kept a {height}x{width} map with edge fraction {fraction:.4f} "
            f"after {SYNTHETIC_RETRIES} draws"
        )

    # float32 storage must not shift the range metadata
    values = values.astype(np.float32).astype(np.float64)
    valid = np.ones(values.shape, dtype=bool)
    if valid_fraction < 1.:
        valid = rng.random(values.shape) < valid_fraction
        if not valid.any():
            valid[height // 2, width // 2] = True
    return DepthMap.from_values(values, valid)


def synthetic_corpus(
    count: int,
    seed: int = 0,
    dims: Tuple[int, int] = (128, 128),
    valid_fraction: float = 1.,
    near: float = SYNTHETIC_NEAR,
    far: float = SYNTHETIC_FAR,
) -> List[DepthMap]:
    if count < 1:
        raise ConfigError(f"count must be at least 1, got {count}")
    height, width = dims
    return [
        synthetic_depth(
            np.random.default_rng([seed, index]), height, width, valid_fraction, near, far
        )
        for index in range(count)
    ]


def gen_synthetic(
    count: int,
    seed: int,
    dims: Tuple[int, int],
    out_dir: Union[str, pathlib.Path],
    valid_fraction: float = 1.,
    near: float = SYNTHETIC_NEAR,
    far: float = SYNTHETIC_FAR,
    prefix: Optional[str] = None,
) -> List[pathlib.Path]:
    out = pathlib.Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise IoError(f"Unable to create {out}: {e}") from e
    prefix = prefix or "synthetic"
    paths = []
    for index, depth in enumerate(synthetic_corpus(count, seed, dims, valid_fraction, near, far)):
        paths.append(save_raw(depth, out / f"{prefix}_{index:04d}{RAW_SUFFIX}"))
    _logger.info(f"Wrote {count} synthetic {dims[0]}x{dims[1]} maps to {out} (seed {seed})")
    return paths
