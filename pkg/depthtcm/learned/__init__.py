# -*- coding: utf-8 -*-
#
# depthtcm
# Copyright (C) 2025  depthtcm contributors
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU Affero General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Affero General Public License for more details.
#
# You should have received a copy of the GNU Affero General Public License
# along with this program.  If not, see <http://www.gnu.org/licenses/>.
#

from .checkpoint import load_checkpoint, model_digest, save_checkpoint
from .entropy import LatentStrings, compress, decompress, likelihood_y, likelihood_z
from .losses import (
    LossParts,
    LossWeights,
    loss_bpp,
    loss_conf,
    loss_mse,
    loss_total,
    loss_tv,
)
from .network import CodecModel, TcmBlock, WindowAttention
from .trainer import (
    Trainer,
    TrainingBatch,
    gradient_check,
    prepare_sample,
    train_codec,
)
from .unwrap import decode_normalized

__all__ = [
    "load_checkpoint",
    "model_digest",
    "save_checkpoint",
    "LatentStrings",
    "compress",
    "decompress",
    "likelihood_y",
    "likelihood_z",
    "LossParts",
    "LossWeights",
    "loss_bpp",
    "loss_conf",
    "loss_mse",
    "loss_total",
    "loss_tv",
    "CodecModel",
    "TcmBlock",
    "WindowAttention",
    "Trainer",
    "TrainingBatch",
    "gradient_check",
    "prepare_sample",
    "train_codec",
    "decode_normalized",
]
