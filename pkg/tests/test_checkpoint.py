# -*- coding: utf-8 -*-
import pytest
import torch

from depthtcm.exceptions import CheckpointError
from depthtcm.learned.checkpoint import (
    load_checkpoint,
    model_digest,
    model_from_bytes,
    model_to_bytes,
    save_checkpoint,
)
from depthtcm.learned.network import CodecModel


def _same_parameters(a, b):
    sa, sb = a.state_dict(), b.state_dict()
    return sa.keys() == sb.keys() and all(torch.equal(sa[k], sb[k]) for k in sa)


def test_bytes_round_trip(tiny_model):
    restored = model_from_bytes(model_to_bytes(tiny_model))
    assert _same_parameters(tiny_model, restored)
    assert (restored.features, restored.latent_channels, restored.hyper_channels) == (8, 8, 4)
    assert restored.head_dim == 4
    assert not restored.training


def test_cnn_backbone_round_trip():
    torch.manual_seed(0)
    model = CodecModel(features=8, latent_channels=8, hyper_channels=4, backbone="cnn", bits=3)
    restored = model_from_bytes(model_to_bytes(model))
    assert restored.backbone == "cnn"
    assert restored.bits == 3
    assert _same_parameters(model, restored)


def test_file_round_trip(tiny_model, tmp_path):
    path = save_checkpoint(tiny_model, tmp_path / "nested" / "model.ckpt")
    assert path.exists()
    assert _same_parameters(tiny_model, load_checkpoint(path))


def test_digest_identifies_parameters(tiny_model):
    digest = model_digest(tiny_model)
    assert len(digest) == 8
    assert digest == model_digest(model_to_bytes(tiny_model))
    with torch.no_grad():
        tiny_model.z_loc[0] += 1.
    assert model_digest(tiny_model) != digest


def test_bad_magic(tiny_model):
    blob = bytearray(model_to_bytes(tiny_model))
    blob[:4] = b"NOPE"
    with pytest.raises(CheckpointError):
        model_from_bytes(bytes(blob))


def test_bad_version(tiny_model):
    blob = bytearray(model_to_bytes(tiny_model))
    blob[4] = 99
    with pytest.raises(CheckpointError):
        model_from_bytes(bytes(blob))


def test_truncated_payload(tiny_model):
    with pytest.raises(CheckpointError):
        model_from_bytes(model_to_bytes(tiny_model)[:-4])


def test_short_header():
    with pytest.raises(CheckpointError):
        model_from_bytes(b"DTCK")


def test_architecture_mismatch(tiny_model):
    blob = bytearray(model_to_bytes(tiny_model))
    # features is the u16 right after magic and version
    blob[5:7] = (16).to_bytes(2, "little")
    with pytest.raises(CheckpointError):
        model_from_bytes(bytes(blob))


def test_missing_file(tmp_path):
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "absent.ckpt")
