# -*- coding: utf-8 -*-
import numpy as np
import pytest
from PIL import Image

from depthtcm.exceptions import IoError, UnsupportedFormat
from depthtcm.pipeline.ingest import (
    detect_format,
    list_corpus,
    load_depth,
    load_png16,
    load_raw,
    save_depth,
    save_mwd_png,
    save_png16,
    save_raw,
    sidecar_path,
)
from depthtcm.pipeline.synthetic import synthetic_depth
from depthtcm.transform.mwd import DepthMap, FringeParams, mwd_encode


@pytest.fixture
def metric_depth():
    return synthetic_depth(np.random.default_rng(8), 24, 20, valid_fraction=.8, near=.5, far=4.)


def test_detect_format():
    assert detect_format("a/b/scan.PNG") == "png"
    assert detect_format("scan.raw") == "raw"
    with pytest.raises(UnsupportedFormat):
        detect_format("scan.jpg")


def test_raw_round_trip(tmp_path, masked_depth):
    path = save_raw(masked_depth, tmp_path / "d.raw")
    assert sidecar_path(path).stat().st_size == 16
    loaded = load_raw(path)
    np.testing.assert_array_equal(loaded.valid, masked_depth.valid)
    np.testing.assert_array_equal(loaded.values, masked_depth.values)
    assert (loaded.z_min, loaded.z_max) == (masked_depth.z_min, masked_depth.z_max)


def test_raw_scale_applied(tmp_path):
    depth = DepthMap.from_values(np.array([[1., 2.], [3., 4.]]))
    path = save_raw(depth, tmp_path / "s.raw", scale=.5)
    np.testing.assert_array_equal(load_raw(path).values, depth.values)


def test_raw_size_mismatch(tmp_path, small_depth):
    path = save_raw(small_depth, tmp_path / "d.raw")
    path.write_bytes(path.read_bytes()[:-4])
    with pytest.raises(UnsupportedFormat):
        load_raw(path)


def test_raw_bad_sidecar(tmp_path, small_depth):
    path = save_raw(small_depth, tmp_path / "d.raw")
    sidecar_path(path).write_bytes(b"\x00" * 8)
    with pytest.raises(UnsupportedFormat):
        load_raw(path)


def test_raw_missing(tmp_path):
    with pytest.raises(IoError):
        load_raw(tmp_path / "absent.raw")


def test_png_round_trip(tmp_path, metric_depth):
    path = save_png16(metric_depth, tmp_path / "d.png")
    with Image.open(path) as img:
        assert img.mode.startswith("I")
    loaded = load_png16(path)
    np.testing.assert_array_equal(loaded.valid, metric_depth.valid)
    err = np.abs(loaded.values - metric_depth.values)[metric_depth.valid]
    assert err.max() <= .0005 + 1e-9


def test_png_without_sentinel(tmp_path):
    counts = np.array([[0, 100], [2000, 65535]], dtype=np.uint16)
    Image.fromarray(counts).save(tmp_path / "c.png")
    loaded = load_png16(tmp_path / "c.png", depth_scale=1., mask_sentinel=None)
    assert loaded.valid.all()
    assert loaded.values.tolist() == [[0., 100.], [2000., 65535.]]


def test_png_sentinel_masks(tmp_path):
    counts = np.array([[0, 100], [2000, 0]], dtype=np.uint16)
    Image.fromarray(counts).save(tmp_path / "c.png")
    loaded = load_depth(tmp_path / "c.png", depth_scale=.001)
    assert loaded.valid.tolist() == [[False, True], [True, False]]
    assert loaded.z_min == pytest.approx(.1)
    assert loaded.z_max == pytest.approx(2.)


def test_png_counts_must_fit(tmp_path):
    depth = DepthMap.from_values(np.array([[100.]]))
    with pytest.raises(UnsupportedFormat):
        save_png16(depth, tmp_path / "big.png", depth_scale=.001)


def test_color_png_rejected(tmp_path):
    Image.fromarray(np.zeros((4, 4, 3), dtype=np.uint8)).save(tmp_path / "rgb.png")
    with pytest.raises(UnsupportedFormat):
        load_png16(tmp_path / "rgb.png")


def test_corrupt_png(tmp_path):
    (tmp_path / "bad.png").write_bytes(b"not a png")
    with pytest.raises(IoError):
        load_depth(tmp_path / "bad.png")


def test_unknown_format_name(tmp_path):
    with pytest.raises(UnsupportedFormat):
        load_depth(tmp_path / "x.raw", fmt="exr")


def test_save_depth_picks_format(tmp_path, metric_depth):
    save_depth(metric_depth, tmp_path / "a.png")
    save_depth(metric_depth, tmp_path / "a.raw")
    assert load_depth(tmp_path / "a.png").valid.sum() == metric_depth.valid_count
    assert load_depth(tmp_path / "a.raw").valid.sum() == metric_depth.valid_count


def test_list_corpus(tmp_path, small_depth):
    save_raw(small_depth, tmp_path / "b.raw")
    save_png16(DepthMap.from_values(np.ones((2, 2))), tmp_path / "a.png")
    (tmp_path / "notes.txt").write_text("x")
    assert [p.name for p in list_corpus(tmp_path)] == ["a.png", "b.raw"]


def test_list_corpus_needs_directory(tmp_path):
    with pytest.raises(IoError):
        list_corpus(tmp_path / "missing")


def test_mwd_png(tmp_path):
    params = FringeParams(period=8., z_range=16.)
    image = mwd_encode(DepthMap.from_values(np.array([[0., 2.], [4., 16.]])), params, 4)
    path = save_mwd_png(image, tmp_path / "mwd.png")
    with Image.open(path) as img:
        assert img.mode == "RGB"
        rgb = np.array(img)
    assert rgb[0, 0].tolist() == [128, 255, 0]
    assert rgb[1, 1, 2] == 255
