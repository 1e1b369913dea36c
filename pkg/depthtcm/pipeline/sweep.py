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
import csv
import dataclasses
import io
import logging
import math
import pathlib
import time
from dataclasses import dataclass

from typing import (
    Callable,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

from ..exceptions import ConfigError, SweepError
from ..learned.network import CodecModel
from ..transform.mwd import DepthMap
from .constants import CSV_HEADER, INF_SENTINEL, ORIGINAL_BPP
from .container import CodecConfig, decode_file, encode_file
from .jobs import run_jobs
from .metrics import MetricsReport, compute_metrics, mean_report
from .monitor import Monitor

Corpus = Sequence[Tuple[str, DepthMap]]
ModelSource = Union[Mapping[float, CodecModel], Callable[[float], CodecModel]]

VARIABLES = ("bits", "lambda")


@dataclass
class ImageResult:
    report: MetricsReport
    enc_ms: float
    dec_ms: float


@dataclass
class RdPoint:
    setting: float
    report: MetricsReport
    enc_ms: float = 0.
    dec_ms: float = 0.

    def __post_init__(self) -> None:
        if self.enc_ms < 0 or self.dec_ms < 0:
            raise ValueError(f"Negative timing for setting {self.setting}")

    @property
    def enc_fps(self) -> float:
        return 1000. / self.enc_ms if self.enc_ms > 0 else math.inf

    @property
    def dec_fps(self) -> float:
        return 1000. / self.dec_ms if self.dec_ms > 0 else math.inf


def evaluate_image(
    image_id: str,
    depth: DepthMap,
    config: CodecConfig,
    model: Optional[CodecModel] = None,
    timing: bool = True,
    original_bpp: float = ORIGINAL_BPP,
) -> ImageResult:
    """Encode, decode and score one map; failures carry the image id."""
    try:
        start = time.perf_counter()
        data = encode_file(depth, config, model)
        mid = time.perf_counter()
        decoded = decode_file(data, model)
        end = time.perf_counter()
        mask = depth.valid & decoded.mask
        report = compute_metrics(
            depth.values, decoded.depth.values, mask, 8 * len(data),
            original_bpp * depth.pixel_count,
        )
    except SweepError:
        raise
    except Exception as e:
        raise SweepError(image_id, str(e)) from e
    if not timing:
        return ImageResult(report, 0., 0.)
    return ImageResult(report, 1000. * (mid - start), 1000. * (end - mid))


def _resolve_model(models: Optional[ModelSource], lmbda: float) -> CodecModel:
    if models is None:
        raise ConfigError("A lambda sweep needs a trained model per lambda")
    if callable(models):
        return models(lmbda)
    try:
        return models[lmbda]
    except KeyError:
        raise ConfigError(f"No model available for lambda={lmbda}") from None


def rd_sweep(
    corpus: Corpus,
    settings: Sequence[float],
    config: Optional[CodecConfig] = None,
    variable: str = "bits",
    models: Optional[ModelSource] = None,
    timing: bool = True,
    jobs: int = 1,
    original_bpp: float = ORIGINAL_BPP,
) -> List[RdPoint]:
    if not corpus:
        raise ConfigError("rd_sweep needs a non-empty corpus")
    if variable not in VARIABLES:
        raise ConfigError(f"Unknown sweep variable {variable!r}, expected one of {VARIABLES}")
    config = config or CodecConfig()
    logger = logging.getLogger("depthtcm.pipeline.sweep")
    monitor = Monitor(logging.getLogger("depthtcm.monitor"))

    points = []
    for setting in settings:
        model = None
        if variable == "bits":
            cfg = dataclasses.replace(config, bits=int(setting))
            if cfg.codec == "learned":
                model = _resolve_model(models, float(setting))
        else:
            cfg = dataclasses.replace(config, codec="learned", adaptive=False)
            model = _resolve_model(models, float(setting))

        def _run(item: Tuple[int, Tuple[str, DepthMap]]) -> ImageResult:
            _, (image_id, depth) = item
            return evaluate_image(image_id, depth, cfg, model, timing, original_bpp)

        results = run_jobs(_run, list(enumerate(corpus)), jobs)
        point = RdPoint(
            setting=float(setting),
            report=mean_report([r.report for r in results]),
            enc_ms=math.fsum(r.enc_ms for r in results) / len(results),
            dec_ms=math.fsum(r.dec_ms for r in results) / len(results),
        )
        points.append(point)
        logger.info(
            f"{variable}={setting:g}: {point.report.bpp:.4f} bpp, "
            f"accuracy {format_value(point.report.accuracy)}%, "
            f"enc {point.enc_ms:.1f} ms ({point.enc_fps:.1f} fps), "
            f"dec {point.dec_ms:.1f} ms ({point.dec_fps:.1f} fps)"
        )
        logger.info(f"Resources after {variable}={setting:g}: {monitor.summary()}")
    return sorted(points, key=lambda p: (p.report.bpp, p.setting))


def format_value(value: Optional[float]) -> str:
    if value is None:
        return ""
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return INF_SENTINEL if value > 0 else "-" + INF_SENTINEL
    return f"{value:.6f}"


def csv_rows(points: Sequence[RdPoint]) -> List[List[str]]:
    rows = [list(CSV_HEADER)]
    for p in sorted(points, key=lambda p: (p.report.bpp, p.setting)):
        r = p.report
        rows.append([
            f"{p.setting:g}",
            format_value(r.bpp),
            format_value(r.psnr),
            format_value(r.rmse),
            format_value(r.nrmse),
            format_value(r.accuracy),
            format_value(r.cr),
            f"{p.enc_ms:.3f}",
            f"{p.dec_ms:.3f}",
        ])
    return rows


def format_csv(points: Sequence[RdPoint]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerows(csv_rows(points))
    return buffer.getvalue()


def write_csv(points: Sequence[RdPoint], fpath: Union[str, pathlib.Path]) -> pathlib.Path:
    path = pathlib.Path(fpath)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_csv(points), encoding="utf-8")
    return path
