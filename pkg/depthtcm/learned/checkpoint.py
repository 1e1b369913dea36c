# -*- coding: utf-8 -*-
"""Versioned binary checkpoints.

Layout, all little-endian::

    magic      4s   b"DTCK"
    version    u8
    features   u16
    latent     u16
    hyper      u16
    window     u8
    head_dim   u8
    backbone   u8   0 = tcm, 1 = cnn
    bits       u8
    count      u64  number of float32 values that follow
    params     f32 * count, state_dict order
"""
from __future__ import annotations
import hashlib
import logging
import pathlib
import struct

import numpy as np
import torch

from typing import Union

from ..exceptions import CheckpointError
from .constants import BACKBONES, CHECKPOINT_MAGIC, CHECKPOINT_VERSION, DIGEST_BYTES
from .network import CodecModel

HEADER = struct.Struct("<4sBHHHBBBBQ")

_logger = logging.getLogger("depthtcm.learned")


def model_to_bytes(model: CodecModel) -> bytes:
    state = model.state_dict()
    flat = [t.detach().cpu().to(torch.float32).reshape(-1).numpy() for t in state.values()]
    params = np.concatenate(flat) if flat else np.zeros(0, dtype=np.float32)
    header = HEADER.pack(
        CHECKPOINT_MAGIC,
        CHECKPOINT_VERSION,
        model.features,
        model.latent_channels,
        model.hyper_channels,
        model.window_size,
        model.head_dim,
        BACKBONES.index(model.backbone),
        model.bits,
        params.size,
    )
    return header + params.astype("<f4").tobytes()


def model_from_bytes(blob: bytes) -> CodecModel:
    if len(blob) < HEADER.size:
        raise CheckpointError("Checkpoint shorter than its header")
    magic, version, features, latent, hyper, window, head_dim, backbone, bits, count = HEADER.unpack_from(blob)
    if magic != CHECKPOINT_MAGIC:
        raise CheckpointError(f"Not a depthtcm checkpoint (magic {magic!r})")
    if version != CHECKPOINT_VERSION:
        raise CheckpointError(f"Unsupported checkpoint version {version}")
    if backbone >= len(BACKBONES):
        raise CheckpointError(f"Unknown backbone id {backbone}")
    payload = blob[HEADER.size:]
    if len(payload) != 4 * count:
        raise CheckpointError(
            f"Checkpoint declares {count} parameters but carries {len(payload)} bytes"
        )
    model = CodecModel(
        features=features,
        latent_channels=latent,
        hyper_channels=hyper,
        window_size=window,
        head_dim=head_dim,
        backbone=BACKBONES[backbone],
        bits=bits,
    )
    values = np.frombuffer(payload, dtype="<f4")
    state = model.state_dict()
    expected = sum(t.numel() for t in state.values())
    if expected != count:
        raise CheckpointError(
            f"Architecture needs {expected} parameters, checkpoint has {count}"
        )
    offset = 0
    loaded = {}
    for name, tensor in state.items():
        n = tensor.numel()
        loaded[name] = torch.from_numpy(values[offset:offset + n].copy()).reshape(tensor.shape)
        offset += n
    model.load_state_dict(loaded)
    model.eval()
    return model


def model_digest(model_or_blob: Union[CodecModel, bytes]) -> bytes:
    blob = model_or_blob if isinstance(model_or_blob, bytes) else model_to_bytes(model_or_blob)
    return hashlib.sha256(blob).digest()[:DIGEST_BYTES]


def save_checkpoint(model: CodecModel, fpath: Union[str, pathlib.Path]) -> pathlib.Path:
    path = pathlib.Path(fpath)
    path.parent.mkdir(parents=True, exist_ok=True)
    blob = model_to_bytes(model)
    path.write_bytes(blob)
    _logger.info(f"Checkpoint written to {path} ({len(blob)} bytes)")
    return path


def load_checkpoint(fpath: Union[str, pathlib.Path]) -> CodecModel:
    path = pathlib.Path(fpath)
    try:
        blob = path.read_bytes()
    except OSError as e:
        raise CheckpointError(f"Unable to read checkpoint {path}: {e}") from e
    model = model_from_bytes(blob)
    _logger.info(f"Loaded {model.describe()} from {path}")
    return model
