# -*- coding: utf-8 -*-
import numpy as np
import pytest

from depthtcm.transform.mwd import DepthMap, FringeParams, mwd_encode, working_depth
from depthtcm.transform.oracle import (
    codebook_breakpoints,
    quantized_codebook,
    worst_case_decode_error,
)
from depthtcm.transform.quantizer import dequantize_mwd, quantize_mwd


@pytest.fixture
def params():
    return FringeParams(period=8., z_range=64.)


def test_breakpoints_cover_working_range(params):
    cuts = codebook_breakpoints(params, 4)
    assert cuts[0] == 0.
    assert cuts[-1] == 64.
    assert np.all(np.diff(cuts) > 0)


def test_orders_recovered_at_four_bits(params):
    codebook = quantized_codebook(params, 4)
    assert codebook.orders_exact
    assert codebook.worst_error < params.period / 2


def test_measured_error_within_codebook_bound(params, rng):
    bound = worst_case_decode_error(params, 4)
    values = rng.uniform(0., params.z_range, size=(50, 50))
    depth = DepthMap.from_values(values)
    restored = dequantize_mwd(quantize_mwd(mwd_encode(depth, params, 4), (4, 4, 4)), params)
    decoded, _ = working_depth(restored)
    assert np.abs(decoded - values).max() <= bound + 1e-9


def test_more_bits_tighter_bound(params):
    assert worst_case_decode_error(params, 8) < worst_case_decode_error(params, 4)


@pytest.fixture
def narrow():
    # four periods, the widest span three bits can still resolve
    return FringeParams(period=8., z_range=32.)


def _dense_error(params, bits, extra):
    grid = np.linspace(0., params.z_range, 2_000_001)
    values = np.concatenate([grid, extra])[None, :]
    depth = DepthMap.from_values(values)
    quantized = quantize_mwd(mwd_encode(depth, params, bits), (bits, bits, bits))
    decoded, _ = working_depth(dequantize_mwd(quantized, params))
    return float(np.abs(decoded - values).max())


@pytest.mark.parametrize("bits", [3, 4, 5, 8])
def test_codebook_matches_dense_sweep(narrow, bits):
    codebook = quantized_codebook(narrow, bits)
    assert codebook.orders_exact
    edges = np.concatenate([codebook.lo + 1e-9, codebook.hi - 1e-9])
    measured = _dense_error(narrow, bits, np.clip(edges, 0., narrow.z_range))
    assert measured == pytest.approx(codebook.worst_error, abs=2e-4)


def test_bound_shrinks_with_every_bit(narrow):
    bounds = [worst_case_decode_error(narrow, bits) for bits in (3, 4, 5, 8)]
    assert all(a > b for a, b in zip(bounds, bounds[1:]))
