# -*- coding: utf-8 -*-
from __future__ import annotations
import math

import numpy as np

from typing import Iterable, Sequence, Union

from ..exceptions import NonPositiveLikelihood
from .rangecoder import AdaptiveFrequencyModel, CdfTable, SymbolStream

ArrayLike = Union[np.ndarray, Sequence[float]]


def _as_array(values) -> np.ndarray:
    if hasattr(values, "detach"):
        values = values.detach().cpu().numpy()
    return np.asarray(values, dtype=np.float64).ravel()


def likelihood_bits(likelihoods: ArrayLike) -> float:
    p = _as_array(likelihoods)
    if p.size == 0:
        return 0.
    if not np.all(np.isfinite(p)) or p.min() <= 0. or p.max() > 1.:
        raise NonPositiveLikelihood(
            f"Likelihoods must lie in (0, 1], got range [{np.nanmin(p)}, {np.nanmax(p)}]"
        )
    return float(-np.log2(p).sum())


def estimate_bpp(
    likelihoods_y: ArrayLike,
    likelihoods_z: ArrayLike,
    pixel_count: int,
) -> float:
    """Bits per pixel of the original depth map implied by latent likelihoods."""
    if pixel_count <= 0:
        raise ValueError(f"Pixel count must be positive, got {pixel_count}")
    return (likelihood_bits(likelihoods_y) + likelihood_bits(likelihoods_z)) / pixel_count


def information_bits(stream: SymbolStream, model: Union[CdfTable, Iterable[CdfTable], AdaptiveFrequencyModel]) -> float:
    """Ideal code length of a stream under the model trajectory the coder sees."""
    total = 0.
    if isinstance(model, (CdfTable, AdaptiveFrequencyModel)):
        models = (model for _ in range(len(stream)))
    else:
        models = iter(model)
    for symbol, m in zip(stream.symbols.tolist(), models):
        _, freq, tot = m.interval(symbol)
        total -= math.log2(freq / tot)
        m.update(symbol)
    return total
