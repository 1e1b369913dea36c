# -*- coding: utf-8 -*-
from __future__ import annotations
import numpy as np


def round_half_away(values: np.ndarray) -> np.ndarray:
    return np.sign(values) * np.floor(np.abs(values) + .5)


def resolvable_span(period: float, bits: int) -> float:
    # Largest working range whose fringe order survives b-bit quantization
    return period * float(2 ** (bits - 1))
