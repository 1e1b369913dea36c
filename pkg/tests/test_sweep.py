# -*- coding: utf-8 -*-
import csv
import io
import math

import numpy as np
import pytest

from depthtcm.exceptions import ConfigError, SweepError
from depthtcm.pipeline.constants import CSV_HEADER
from depthtcm.pipeline.container import CodecConfig
from depthtcm.pipeline.metrics import MetricsReport
from depthtcm.pipeline.sweep import (
    RdPoint,
    evaluate_image,
    format_csv,
    format_value,
    rd_sweep,
    write_csv,
)
from depthtcm.pipeline.synthetic import synthetic_corpus
from depthtcm.transform.mwd import DepthMap


def _by_setting(points):
    return {p.setting: p for p in points}


def test_evaluate_image(small_depth):
    result = evaluate_image("map0", small_depth, CodecConfig(bits=4))
    assert result.report.valid_pixel_count == small_depth.valid_count
    assert result.enc_ms > 0 and result.dec_ms > 0
    assert result.report.accuracy > 95.


def test_evaluate_without_timing(small_depth):
    result = evaluate_image("map0", small_depth, CodecConfig(bits=4), timing=False)
    assert (result.enc_ms, result.dec_ms) == (0., 0.)


def test_failure_names_the_image():
    depth = DepthMap.from_values(np.full((4, 4), np.nan))
    with pytest.raises(SweepError) as info:
        evaluate_image("broken_0007", depth, CodecConfig())
    assert info.value.image_id == "broken_0007"


def test_bits_sweep_points(small_corpus):
    points = rd_sweep(small_corpus, [8, 4], timing=False)
    assert [p.setting for p in points] == [4., 8.]
    assert points[0].report.bpp < points[1].report.bpp
    assert all(p.enc_ms == 0. and p.dec_ms == 0. for p in points)
    assert points[0].report.valid_pixel_count == sum(d.valid_count for _, d in small_corpus)


def test_parallel_matches_serial(small_corpus):
    serial = rd_sweep(small_corpus, [4], timing=False, jobs=1)
    parallel = rd_sweep(small_corpus, [4], timing=False, jobs=3)
    assert serial[0].report == parallel[0].report


def test_lambda_sweep_uses_models(small_corpus, tiny_model):
    points = rd_sweep(small_corpus, [.05], variable="lambda", models={.05: tiny_model}, timing=False)
    assert len(points) == 1
    assert points[0].setting == .05
    assert points[0].report.bpp > 0


def test_lambda_sweep_accepts_factory(small_corpus, tiny_model):
    seen = []

    def factory(lmbda):
        seen.append(lmbda)
        return tiny_model

    rd_sweep(small_corpus[:1], [.01, .02], variable="lambda", models=factory, timing=False)
    assert seen == [.01, .02]


def test_lambda_sweep_needs_models(small_corpus):
    with pytest.raises(ConfigError):
        rd_sweep(small_corpus, [.05], variable="lambda")


def test_missing_lambda_model(small_corpus, tiny_model):
    with pytest.raises(ConfigError):
        rd_sweep(small_corpus, [.1], variable="lambda", models={.05: tiny_model})


def test_unknown_variable(small_corpus):
    with pytest.raises(ConfigError):
        rd_sweep(small_corpus, [4], variable="period")


def test_empty_corpus():
    with pytest.raises(ConfigError):
        rd_sweep([], [4])


def test_negative_timing_rejected():
    report = MetricsReport(40., .1, .01, 99., 1., 16., 4)
    with pytest.raises(ValueError):
        RdPoint(4., report, enc_ms=-1.)


def test_fps():
    report = MetricsReport(40., .1, .01, 99., 1., 16., 4)
    point = RdPoint(4., report, enc_ms=20., dec_ms=0.)
    assert point.enc_fps == pytest.approx(50.)
    assert point.dec_fps == math.inf


@pytest.mark.parametrize("value, text", [
    (None, ""),
    (math.nan, "nan"),
    (math.inf, "inf"),
    (-math.inf, "-inf"),
    (1.5, "1.500000"),
])
def test_format_value(value, text):
    assert format_value(value) == text


def test_csv_layout(tmp_path):
    points = [
        RdPoint(8., MetricsReport(60., .1, .001, 99.9, 2.5, 6.4, 10), 1.25, 2.5),
        RdPoint(4., MetricsReport(math.inf, 0., 0., 100., 1.25, 12.8, 10)),
        RdPoint(2., MetricsReport(math.nan, 1., math.nan, None, .5, 32., 10)),
    ]
    text = format_csv(points)
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_HEADER
    assert [r[0] for r in rows[1:]] == ["2", "4", "8"]
    assert rows[1][2] == "nan" and rows[1][5] == ""
    assert rows[2][2] == "inf"
    assert rows[3][7:] == ["1.250", "2.500"]
    path = write_csv(points, tmp_path / "out" / "rd.csv")
    assert path.read_text(encoding="utf-8") == text


@pytest.mark.slow
def test_bits_sweep_shape():
    maps = synthetic_corpus(8, seed=0, dims=(128, 128))
    corpus = [(f"synthetic_{i:04d}", d) for i, d in enumerate(maps)]
    points = _by_setting(rd_sweep(corpus, [8, 5, 4, 3, 2], timing=False, jobs=2))
    bpp = [points[b].report.bpp for b in (8., 5., 4., 3., 2.)]
    assert all(a > b for a, b in zip(bpp, bpp[1:]))
    acc8 = points[8.].report.accuracy
    acc4 = points[4.].report.accuracy
    acc2 = points[2.].report.accuracy
    assert acc8 - acc4 < .5
    # two bits squeeze the span into two fringe periods; accuracy drops about 1.5 points
    assert acc2 < 99.
    assert 1. < acc4 - acc2 < 2.5
