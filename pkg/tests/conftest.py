# -*- coding: utf-8 -*-
import numpy as np
import pytest
import torch

from depthtcm.learned.network import CodecModel
from depthtcm.pipeline.synthetic import synthetic_corpus, synthetic_depth
from depthtcm.transform.mwd import DepthMap


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long running training and sweep checks")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_depth():
    return synthetic_depth(np.random.default_rng(5), 32, 32)


@pytest.fixture
def masked_depth():
    return synthetic_depth(np.random.default_rng(6), 32, 32, valid_fraction=0.7)


@pytest.fixture
def small_corpus():
    maps = synthetic_corpus(3, seed=11, dims=(32, 32))
    return [(f"map{i}", d) for i, d in enumerate(maps)]


@pytest.fixture
def ramp_depth():
    values = np.tile(np.linspace(0., 640., 24), (16, 1))
    return DepthMap.from_values(values)


@pytest.fixture
def tiny_model():
    torch.manual_seed(0)
    model = CodecModel(features=8, latent_channels=8, hyper_channels=4, window_size=4, head_dim=4)
    model.eval()
    return model
