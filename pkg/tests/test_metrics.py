# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest

from depthtcm.exceptions import EmptyMask
from depthtcm.pipeline.metrics import (
    MetricsReport,
    accuracy_from_nrmse,
    compute_metrics,
    mean_report,
    psnr_from_nrmse,
)


def _report(nrmse, psnr=None, bpp=1., cr=16.):
    return MetricsReport(
        psnr=psnr_from_nrmse(nrmse) if psnr is None else psnr,
        rmse=nrmse * 10.,
        nrmse=nrmse,
        accuracy=accuracy_from_nrmse(nrmse),
        bpp=bpp,
        cr=cr,
        valid_pixel_count=4,
    )


def test_accuracy_from_rmse_and_range():
    truth = np.array([0., 334.4])
    decoded = truth + np.array([.535, -.535])
    report = compute_metrics(truth, decoded, np.ones(2, dtype=bool), coded_bits=8)
    assert report.rmse == pytest.approx(.535)
    assert report.nrmse == pytest.approx(.0016, abs=1e-5)
    assert report.accuracy == pytest.approx(99.84, abs=.005)
    assert report.psnr == pytest.approx(-20 * math.log10(.535 / 334.4))


def test_compression_ratio():
    n = 1000
    truth = np.linspace(0., 1., n)
    report = compute_metrics(truth, truth, np.ones(n, dtype=bool), coded_bits=307, original_bits=13600)
    assert report.bpp == pytest.approx(.307)
    assert report.cr == pytest.approx(44.3, abs=.01)


def test_default_original_is_sixteen_bits():
    truth = np.arange(8.)
    report = compute_metrics(truth, truth, np.ones(8, dtype=bool), coded_bits=16)
    assert report.cr == pytest.approx(8.)
    assert report.bpp == pytest.approx(2.)


def test_exact_decode():
    truth = np.arange(6.).reshape(2, 3)
    report = compute_metrics(truth, truth.copy(), np.ones((2, 3), dtype=bool), 10)
    assert report.rmse == 0.
    assert report.psnr == math.inf
    assert report.accuracy == 100.


def test_only_masked_pixels_count():
    truth = np.array([[0., 10.], [5., 1000.]])
    decoded = np.array([[1., 10.], [5., -50.]])
    mask = np.array([[True, True], [True, False]])
    report = compute_metrics(truth, decoded, mask, 32)
    assert report.valid_pixel_count == 3
    assert report.rmse == pytest.approx(math.sqrt(1. / 3.))
    assert report.nrmse == pytest.approx(math.sqrt(1. / 3.) / 10.)
    # rate is per pixel of the whole map
    assert report.bpp == pytest.approx(8.)


def test_zero_range_truth():
    truth = np.full(4, 7.)
    report = compute_metrics(truth, truth + 1., np.ones(4, dtype=bool), 8)
    assert report.rmse == pytest.approx(1.)
    assert math.isnan(report.nrmse)
    assert math.isnan(report.psnr)
    assert report.accuracy is None


def test_empty_mask():
    with pytest.raises(EmptyMask):
        compute_metrics(np.zeros(3), np.zeros(3), np.zeros(3, dtype=bool), 8)


def test_shape_mismatch():
    with pytest.raises(ValueError):
        compute_metrics(np.zeros(3), np.zeros(4), np.ones(3, dtype=bool), 8)


class TestMean:

    def test_accuracy_follows_mean_nrmse(self):
        mean = mean_report([_report(.01), _report(.03)])
        assert mean.nrmse == pytest.approx(.02)
        assert mean.accuracy == pytest.approx(98.)
        assert mean.valid_pixel_count == 8

    def test_psnr_is_averaged_not_recomputed(self):
        mean = mean_report([_report(.01), _report(.1)])
        assert mean.psnr == pytest.approx(30.)

    def test_nan_propagates(self):
        mean = mean_report([_report(.01), _report(math.nan)])
        assert math.isnan(mean.nrmse)
        assert mean.accuracy is None

    def test_infinite_psnr_propagates(self):
        mean = mean_report([_report(0.), _report(.01)])
        assert mean.psnr == math.inf
        assert mean.accuracy == pytest.approx(99.5)

    def test_empty(self):
        with pytest.raises(ValueError):
            mean_report([])

    def test_as_dict(self):
        assert set(_report(.01).as_dict()) == {
            "psnr", "rmse", "nrmse", "accuracy", "bpp", "cr", "valid_pixel_count",
        }
