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
from __future__ import annotations
import copy
import logging
from dataclasses import dataclass, field

import numpy as np
import torch
from torch import Tensor

from typing import (
    Dict,
    List,
    Optional,
    Sequence,
    Tuple,
)

from ..coding.constants import LIKELIHOOD_FLOOR
from ..exceptions import ConfigError, NonFinite, NonFiniteGradient
from ..transform.mwd import DepthMap, FringeParams, mwd_encode, prescale_depth
from ..transform.quantizer import dequantize_mwd, quantize_mwd
from .constants import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_LEARNING_RATE,
    MAX_SKIPPED_STEPS,
)
from .losses import (
    LossParts,
    LossWeights,
    loss_bpp,
    loss_conf,
    loss_mse,
    loss_total,
    loss_tv,
)
from .network import CodecModel, CodecOutput
from .unwrap import decode_normalized


@dataclass
class TrainingSample:
    x: np.ndarray
    target: np.ndarray
    mask: np.ndarray
    period: float
    z_range: float


def prepare_sample(depth: DepthMap, period: float = 8., bits: int = 4) -> TrainingSample:
    """Quantized MWD input and normalized working-depth target of one depth map."""
    working, _ = prescale_depth(depth, period, bits)
    params = FringeParams.for_depth(working, period)
    image = mwd_encode(working, params, bits)
    restored = dequantize_mwd(quantize_mwd(image, (bits, bits, bits)), params)
    return TrainingSample(
        x=restored.stack().astype(np.float32),
        target=(working.values / params.z_range).astype(np.float32),
        mask=working.valid.copy(),
        period=params.period,
        z_range=params.z_range,
    )


@dataclass
class TrainingBatch:
    x: Tensor
    target: Tensor
    mask: Tensor
    period: Tensor
    z_range: Tensor

    @classmethod
    def from_samples(cls, samples: Sequence[TrainingSample]) -> TrainingBatch:
        return cls(
            x=torch.from_numpy(np.stack([s.x for s in samples])),
            target=torch.from_numpy(np.stack([s.target for s in samples])),
            mask=torch.from_numpy(np.stack([s.mask for s in samples])),
            period=torch.tensor([s.period for s in samples], dtype=torch.float32),
            z_range=torch.tensor([s.z_range for s in samples], dtype=torch.float32),
        )

    @property
    def pixel_count(self) -> int:
        return int(self.x.shape[-2] * self.x.shape[-1])

    def to(self, dtype: torch.dtype) -> TrainingBatch:
        return TrainingBatch(
            self.x.to(dtype), self.target.to(dtype), self.mask,
            self.period.to(dtype), self.z_range.to(dtype),
        )


@dataclass
class LossResult:
    total: Tensor
    parts: LossParts
    output: CodecOutput
    pred: Tensor
    order: Tensor


def codec_loss(
    model: CodecModel,
    batch: TrainingBatch,
    weights: LossWeights,
    mode: str = "train",
    generator: Optional[torch.Generator] = None,
) -> LossResult:
    out = model(batch.x, mode, generator)
    pred, order = decode_normalized(out.x_hat, batch.period, batch.z_range)
    parts = LossParts(
        mse=loss_mse(pred, batch.target, batch.mask),
        bpp=loss_bpp(out.likelihoods_y, out.likelihoods_z, batch.pixel_count),
        conf=loss_conf(pred, batch.target, batch.mask, weights.tau),
        tv=loss_tv(pred),
        img=loss_mse(out.x_hat, batch.x, batch.mask[:, None]),
    )
    return LossResult(loss_total(parts, weights), parts, out, pred, order)


@dataclass
class TrainStats:
    step: int
    loss: float
    parts: Dict[str, float] = field(default_factory=dict)
    skipped: bool = False


class Trainer:
    """Adam on the rate-distortion objective, one batch per step."""

    def __init__(
        self,
        model: CodecModel,
        weights: Optional[LossWeights] = None,
        learning_rate: float = DEFAULT_LEARNING_RATE,
        batch_size: int = DEFAULT_BATCH_SIZE,
        seed: int = 0,
        log_every: int = 20,
    ) -> None:
        self._logger = logging.getLogger("depthtcm.learned.trainer")
        self.model = model
        self.weights = weights or LossWeights()
        self.batch_size = batch_size
        self.log_every = log_every
        self.optimizer = torch.optim.Adam(model.parameters(), lr=learning_rate)
        self.generator = torch.Generator().manual_seed(seed)
        self._rng = np.random.default_rng(seed)
        self.steps = 0
        self.history: List[TrainStats] = []

    def _gradients_finite(self) -> bool:
        for p in self.model.parameters():
            if p.grad is not None and not torch.isfinite(p.grad).all():
                return False
        return True

    def train_step(self, batch: TrainingBatch) -> TrainStats:
        self.model.train()
        self.optimizer.zero_grad()
        self.steps += 1
        try:
            result = codec_loss(self.model, batch, self.weights, "train", self.generator)
        except NonFinite as e:
            self._logger.warning(f"Step {self.steps} skipped: {e}")
            stats = TrainStats(self.steps, float("nan"), {}, skipped=True)
            self.history.append(stats)
            return stats

        result.total.backward()
        stats = TrainStats(self.steps, float(result.total.detach()), result.parts.as_floats())
        if not self._gradients_finite():
            self._logger.warning(f"Step {self.steps} skipped: non-finite gradient")
            self.optimizer.zero_grad()
            stats.skipped = True
        else:
            self.optimizer.step()
        self.history.append(stats)
        return stats

    def batches(self, samples: Sequence[TrainingSample]):
        while True:
            order = self._rng.permutation(len(samples))
            for start in range(0, len(order) - self.batch_size + 1, self.batch_size):
                yield TrainingBatch.from_samples(
                    [samples[i] for i in order[start:start + self.batch_size]]
                )
            if len(samples) < self.batch_size:
                yield TrainingBatch.from_samples([samples[i] for i in order])

    def fit(self, samples: Sequence[TrainingSample], steps: int) -> List[TrainStats]:
        if not samples:
            raise ValueError("No training samples")
        self._logger.info(
            f"Training {self.model.describe()} for {steps} steps on {len(samples)} maps, "
            f"lambda={self.weights.lmbda}"
        )
        run: List[TrainStats] = []
        skipped = 0
        batches = self.batches(samples)
        for _ in range(steps):
            stats = self.train_step(next(batches))
            run.append(stats)
            skipped = skipped + 1 if stats.skipped else 0
            if skipped > MAX_SKIPPED_STEPS:
                raise NonFiniteGradient(
                    f"{skipped} consecutive steps skipped at step {stats.step}"
                )
            if self.log_every and stats.step % self.log_every == 0:
                parts = ", ".join(f"{k}={v:.4g}" for k, v in stats.parts.items())
                self._logger.info(f"step {stats.step}: loss {stats.loss:.4f} ({parts})")
        return run


def smoothed(values: Sequence[float], alpha: float = .1) -> List[float]:
    out = []
    ema = None
    for v in values:
        ema = v if ema is None else (1. - alpha) * ema + alpha * v
        out.append(ema)
    return out


@dataclass
class GradientCheckReport:
    max_relative_error: float
    checked: int
    skipped: int
    errors: List[float] = field(default_factory=list)


def _kink_state(result: LossResult, batch: TrainingBatch, tau: float) -> Tuple[Tensor, ...]:
    err = (result.pred - batch.target).detach().abs() * batch.mask
    per_image = err.reshape(err.shape[0], -1).max(dim=1).values.reshape(-1, 1, 1)
    selected = err > tau * per_image
    floored = torch.cat([
        (result.output.likelihoods_y <= LIKELIHOOD_FLOOR).reshape(-1),
        (result.output.likelihoods_z <= LIKELIHOOD_FLOOR).reshape(-1),
    ])
    return result.order, selected, floored


def _same_state(a: Tuple[Tensor, ...], b: Tuple[Tensor, ...]) -> bool:
    return all(torch.equal(x, y) for x, y in zip(a, b))


def gradient_check(
    model: CodecModel,
    batch: TrainingBatch,
    weights: Optional[LossWeights] = None,
    samples: int = 100,
    eps: float = 1e-5,
    seed: int = 0,
    scale_floor: float = 1e-4,
) -> GradientCheckReport:
    """Compare autograd with central differences on a random parameter sample.

    Runs in float64 on a copy of the model with the smooth noise proxy.
    Samples whose perturbation changes a discrete state (fringe order,
    confidence selection, likelihood floor) sit on a kink and are skipped.
    """
    weights = weights or LossWeights()
    m = copy.deepcopy(model).double()
    m.train()
    batch = batch.to(torch.float64)

    def evaluate() -> LossResult:
        gen = torch.Generator().manual_seed(seed)
        return codec_loss(m, batch, weights, "noise", gen)

    m.zero_grad()
    base = evaluate()
    base.total.backward()
    base_state = _kink_state(base, batch, weights.tau)

    params = [p for p in m.parameters() if p.requires_grad]
    sizes = np.array([p.numel() for p in params])
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    rng = np.random.default_rng(seed)
    picks = rng.choice(int(offsets[-1]), size=min(samples, int(offsets[-1])), replace=False)

    report = GradientCheckReport(0., 0, 0)
    with torch.no_grad():
        for flat in picks.tolist():
            which = int(np.searchsorted(offsets, flat, side="right")) - 1
            p = params[which].view(-1)
            idx = flat - int(offsets[which])
            original = p[idx].item()
            p[idx] = original + eps
            plus = evaluate()
            p[idx] = original - eps
            minus = evaluate()
            p[idx] = original
            if not (_same_state(base_state, _kink_state(plus, batch, weights.tau))
                    and _same_state(base_state, _kink_state(minus, batch, weights.tau))):
                report.skipped += 1
                continue
            numeric = (plus.total.item() - minus.total.item()) / (2. * eps)
            analytic = params[which].grad.view(-1)[idx].item()
            rel = abs(analytic - numeric) / max(abs(analytic), abs(numeric), scale_floor)
            report.errors.append(rel)
            report.checked += 1
            report.max_relative_error = max(report.max_relative_error, rel)
    return report


def train_codec(
    depths: Sequence[DepthMap],
    weights: Optional[LossWeights] = None,
    steps: int = 200,
    learning_rate: float = DEFAULT_LEARNING_RATE,
    batch_size: int = DEFAULT_BATCH_SIZE,
    period: float = 8.,
    bits: int = 4,
    backbone: str = "tcm",
    seed: int = 0,
    log_every: int = 20,
) -> Tuple[CodecModel, List[TrainStats]]:
    if not depths:
        raise ConfigError("No training maps")
    shapes = {d.values.shape for d in depths}
    if len(shapes) != 1:
        raise ConfigError(f"Training maps must share one shape, got {sorted(shapes)}")
    torch.manual_seed(seed)
    model = CodecModel(backbone=backbone, bits=bits)
    samples = [prepare_sample(d, period, bits) for d in depths]
    trainer = Trainer(model, weights, learning_rate, batch_size, seed, log_every)
    history = trainer.fit(samples, steps)
    model.eval()
    return model, history
