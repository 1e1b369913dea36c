# -*- coding: utf-8 -*-
import numpy as np
import pytest

from depthtcm.coding.baseline import (
    decode_mask,
    decode_plane,
    decode_planes_baseline,
    encode_mask,
    encode_plane,
    encode_planes_baseline,
    predict_residuals,
    reconstruct_plane,
    split_blocks,
)
from depthtcm.exceptions import LengthMismatch, TruncatedStream
from depthtcm.transform.quantizer import QuantizedMwd


def test_residuals_invert(rng):
    plane = rng.integers(0, 32, size=(9, 13))
    np.testing.assert_array_equal(reconstruct_plane(predict_residuals(plane, 5), 5), plane)


def test_plane_round_trip(rng):
    plane = rng.integers(0, 16, size=(20, 30))
    decoded, bits = decode_plane(encode_plane(plane, 4), (20, 30))
    assert bits == 4
    np.testing.assert_array_equal(decoded, plane)


def test_constant_plane_is_small():
    data = encode_plane(np.full((64, 64), 9), 4)
    assert len(data) < 32


def test_random_plane_costs_its_bits(rng):
    plane = rng.integers(0, 16, size=(128, 128))
    bpp = 8 * len(encode_plane(plane, 4)) / plane.size
    assert 4 * .98 <= bpp <= 4 * 1.02


def test_smooth_plane_beats_raw():
    ramp = np.add.outer(np.arange(64), np.arange(64)) // 8 % 16
    assert 8 * len(encode_plane(ramp, 4)) < 4 * ramp.size / 2


def test_plane_shape_mismatch():
    data = encode_plane(np.zeros((4, 4), dtype=np.int64), 4)
    with pytest.raises(LengthMismatch):
        decode_plane(data, (4, 5))


def test_plane_header_cut():
    with pytest.raises(TruncatedStream):
        decode_plane(b"\x01\x00", (1, 1))


@pytest.mark.parametrize("fill", [True, False])
def test_uniform_mask(fill):
    mask = np.full((17, 23), fill)
    np.testing.assert_array_equal(decode_mask(encode_mask(mask), mask.shape), mask)


def test_random_mask_round_trip(rng):
    mask = rng.uniform(size=(40, 50)) < .8
    np.testing.assert_array_equal(decode_mask(encode_mask(mask), mask.shape), mask)


def test_single_hole_mask():
    mask = np.ones((30, 30), dtype=bool)
    mask[12, 7] = False
    data = encode_mask(mask)
    assert len(data) < 16
    np.testing.assert_array_equal(decode_mask(data, mask.shape), mask)


def test_mask_shape_mismatch():
    data = encode_mask(np.ones((3, 3), dtype=bool))
    with pytest.raises(LengthMismatch):
        decode_mask(data, (3, 4))


def test_planes_round_trip(rng):
    r = rng.integers(0, 16, size=(12, 10))
    g = rng.integers(0, 8, size=(12, 10))
    b = rng.integers(0, 32, size=(12, 10))
    mask = rng.uniform(size=(12, 10)) < .9
    data = encode_planes_baseline(QuantizedMwd(r, g, b, 4, 3, 5), mask)
    decoded, decoded_mask = decode_planes_baseline(data, (12, 10))
    assert decoded.bits == (4, 3, 5)
    for got, want in ((decoded.r, r), (decoded.g, g), (decoded.b, b)):
        np.testing.assert_array_equal(got, want)
    np.testing.assert_array_equal(decoded_mask, mask)


def test_block_runs_past_end():
    data = encode_planes_baseline(
        QuantizedMwd(*(np.zeros((4, 4), dtype=np.int64),) * 3, 4, 4, 4), np.ones((4, 4), dtype=bool)
    )
    with pytest.raises(TruncatedStream):
        split_blocks(data[:-3])


def test_block_count_checked():
    with pytest.raises(LengthMismatch):
        split_blocks(b"\x00\x00\x00\x00", expected=4)
