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
import argparse
import contextlib
import logging
import pathlib
import sys

from typing import (
    Any,
    Dict,
    Iterator,
    List,
    Optional,
    Sequence,
    Tuple,
)

from . import DepthTcm
from .exceptions import ConfigError, DepthTcmError, IoError, SweepError
from .learned.checkpoint import load_checkpoint, save_checkpoint
from .learned.losses import LossWeights
from .learned.network import CodecModel
from .learned.trainer import smoothed, train_codec
from .pipeline.constants import CSV_HEADER
from .pipeline.container import CodecConfig, decode_file, encode_file
from .pipeline.ingest import list_corpus, load_depth, save_depth, save_mwd_png
from .pipeline.metrics import mean_report
from .pipeline.monitor import Monitor
from .pipeline.sweep import evaluate_image, format_csv, format_value, rd_sweep, write_csv
from .pipeline.synthetic import gen_synthetic, synthetic_corpus
from .settings import Settings
from .transform.mwd import DepthMap, FringeParams, mwd_encode, prescale_depth
from .transform.quantizer import dequantize_mwd, quantize_mwd

CONTAINER_SUFFIX = ".dtcm"

# argparse destination -> setting key path
FLAG_SETTINGS = {
    "bits": "codec.bits",
    "codec": "codec.name",
    "period": "codec.period",
    "adaptive": "codec.adaptive",
    "checkpoint": "codec.checkpoint",
    "format": "ingest.format",
    "mask_sentinel": "ingest.mask_sentinel",
    "depth_scale": "ingest.depth_scale",
    "lmbda": "train.lambda",
    "steps": "train.steps",
    "backbone": "train.backbone",
    "count": "synthetic.count",
    "height": "synthetic.height",
    "width": "synthetic.width",
    "valid_fraction": "synthetic.valid_fraction",
    "jobs": "jobs",
    "debug": "debug_logging",
    "log_file": "log_file",
}

Corpus = List[Tuple[str, DepthMap]]

_logger = logging.getLogger("depthtcm")


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value settings file")
    common.add_argument("--bits", type=int, choices=range(2, 9), help="bits per channel")
    common.add_argument("--codec", choices=("baseline", "learned"))
    common.add_argument("--lambda", dest="lmbda", type=float, help="rate-distortion trade-off")
    common.add_argument("--period", type=float, help="fringe period in working depth units")
    common.add_argument("--adaptive", action="store_true", default=None,
                        help="patch-adaptive quantization (baseline codec)")
    common.add_argument("--checkpoint", help="model checkpoint (file, or directory for lambda sweeps)")
    common.add_argument("--format", choices=("auto", "png", "raw"))
    common.add_argument("--mask-sentinel", type=int)
    common.add_argument("--depth-scale", type=float, help="depth units per 16-bit count")
    common.add_argument("--jobs", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output path")
    common.add_argument("--log-file")
    common.add_argument("--debug", action="store_true", default=None)

    parser = argparse.ArgumentParser(
        prog="depthtcm", description="Multiwavelength depth map compression"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    encode = commands.add_parser("encode", parents=[common], help="compress a depth map")
    encode.add_argument("input")
    encode.set_defaults(func=cmd_encode)

    decode = commands.add_parser("decode", parents=[common], help="restore a depth map")
    decode.add_argument("input")
    decode.set_defaults(func=cmd_decode)

    evaluate = commands.add_parser("eval", parents=[common], help="round trip and score files")
    evaluate.add_argument("inputs", nargs="+")
    evaluate.add_argument("--no-timing", action="store_true", default=None)
    evaluate.set_defaults(func=cmd_eval)

    sweep = commands.add_parser("sweep", parents=[common], help="rate-distortion sweep")
    sweep.add_argument("inputs", nargs="*", help="depth files or directories (synthetic corpus if empty)")
    sweep.add_argument("--bits-list", type=_float_list, default=[8, 5, 4, 3, 2])
    sweep.add_argument("--lambdas", type=_float_list, help="sweep the learned codec over lambda")
    sweep.add_argument("--no-timing", action="store_true", default=None)
    sweep.add_argument("--steps", type=int, help="training steps per lambda without a checkpoint")
    sweep.set_defaults(func=cmd_sweep)

    synth = commands.add_parser("gen-synthetic", parents=[common], help="write a synthetic corpus")
    synth.add_argument("--count", type=int)
    synth.add_argument("--height", type=int)
    synth.add_argument("--width", type=int)
    synth.add_argument("--valid-fraction", type=float)
    synth.set_defaults(func=cmd_gen_synthetic)

    train = commands.add_parser("train", parents=[common], help="fit the learned codec")
    train.add_argument("inputs", nargs="*", help="depth files or directories (synthetic corpus if empty)")
    train.add_argument("--steps", type=int)
    train.add_argument("--backbone", choices=("tcm", "cnn"))
    train.set_defaults(func=cmd_train)

    export = commands.add_parser("export-mwd", parents=[common], help="write the MWD image as RGB PNG")
    export.add_argument("input")
    export.add_argument("--quantize", action="store_true", help="snap channels to --bits first")
    export.set_defaults(func=cmd_export_mwd)
    return parser


def resolve_settings(args: argparse.Namespace) -> Settings:
    settings = Settings(DepthTcm.get_settings_defaults())
    if args.config:
        settings.load_file(args.config)
    overrides: Dict[str, Any] = {}
    for dest, key in FLAG_SETTINGS.items():
        value = getattr(args, dest, None)
        if value is not None:
            overrides[key] = value
    if args.seed is not None:
        overrides["train.seed"] = args.seed
        overrides["synthetic.seed"] = args.seed
    if getattr(args, "no_timing", None):
        overrides["sweep.timing"] = False
    settings.update(overrides)
    return settings


@contextlib.contextmanager
def file_context(path: Any) -> Iterator[None]:
    try:
        yield
    except SweepError:
        raise
    except DepthTcmError as e:
        raise e.__class__(f"{path}: {e}") from e


def _load(settings: Settings, path: Any) -> DepthMap:
    with file_context(path):
        return load_depth(
            path,
            settings.get(["ingest", "format"]),
            settings.get_float(["ingest", "depth_scale"]),
            settings.get_int(["ingest", "mask_sentinel"]),
        )


def _model(settings: Settings) -> Optional[CodecModel]:
    path = settings.get(["codec", "checkpoint"])
    if not path:
        return None
    return load_checkpoint(path)


def _corpus(settings: Settings, inputs: Sequence[str]) -> Corpus:
    if not inputs:
        count = settings.get_int(["synthetic", "count"])
        maps = synthetic_corpus(
            count,
            settings.get_int(["synthetic", "seed"]),
            (settings.get_int(["synthetic", "height"]), settings.get_int(["synthetic", "width"])),
            settings.get_float(["synthetic", "valid_fraction"]),
            settings.get_float(["synthetic", "near"]),
            settings.get_float(["synthetic", "far"]),
        )
        return [(f"synthetic_{i:04d}", d) for i, d in enumerate(maps)]
    paths: List[pathlib.Path] = []
    for item in inputs:
        path = pathlib.Path(item)
        paths.extend(list_corpus(path) if path.is_dir() else [path])
    if not paths:
        raise ConfigError(f"No depth files found in {', '.join(inputs)}")
    return [(str(p), _load(settings, p)) for p in paths]


def _train(settings: Settings, corpus: Corpus, lmbda: float) -> CodecModel:
    weights = LossWeights(
        lmbda=lmbda,
        w_tv=settings.get_float(["train", "w_tv"]),
        tau=settings.get_float(["train", "tau"]),
        w_img=settings.get_float(["train", "w_img"]),
    )
    model, history = train_codec(
        [d for _, d in corpus],
        weights,
        steps=settings.get_int(["train", "steps"]),
        learning_rate=settings.get_float(["train", "learning_rate"]),
        batch_size=settings.get_int(["train", "batch_size"]),
        period=settings.get_float(["codec", "period"]),
        bits=settings.get_int(["codec", "bits"]),
        backbone=settings.get(["train", "backbone"]),
        seed=settings.get_int(["train", "seed"]),
        log_every=settings.get_int(["train", "log_every"]),
    )
    losses = [s.loss for s in history if not s.skipped]
    if losses:
        curve = smoothed(losses)
        _logger.info(f"lambda={lmbda:g}: smoothed loss {curve[0]:.4f} -> {curve[-1]:.4f}")
    return model


def checkpoint_name(lmbda: float) -> str:
    return f"model_lambda{lmbda:g}.ckpt"


def cmd_encode(app: DepthTcm, args: argparse.Namespace) -> int:
    settings = app.settings
    depth = _load(settings, args.input)
    config = CodecConfig.from_settings(settings)
    model = _model(settings) if config.codec == "learned" else None
    with file_context(args.input):
        data = encode_file(depth, config, model)
    out = pathlib.Path(args.out or pathlib.Path(args.input).with_suffix(CONTAINER_SUFFIX))
    out.write_bytes(data)
    print(f"{out}: {len(data)} bytes, {8 * len(data) / depth.pixel_count:.4f} bpp")
    return 0


def cmd_decode(app: DepthTcm, args: argparse.Namespace) -> int:
    settings = app.settings
    try:
        data = pathlib.Path(args.input).read_bytes()
    except OSError as e:
        raise IoError(f"Unable to read {args.input}: {e}") from e
    with file_context(args.input):
        decoded = decode_file(data, _model(settings))
    out = pathlib.Path(args.out or pathlib.Path(args.input).with_suffix(".raw"))
    save_depth(decoded.depth, out, settings.get_float(["ingest", "depth_scale"]))
    print(f"{out}: {decoded.depth.width}x{decoded.depth.height}, {decoded.depth.valid_count} valid pixels")
    return 0


def cmd_eval(app: DepthTcm, args: argparse.Namespace) -> int:
    settings = app.settings
    monitor = Monitor(logging.getLogger("depthtcm.monitor"))
    corpus = _corpus(settings, args.inputs)
    config = CodecConfig.from_settings(settings)
    model = _model(settings) if config.codec == "learned" else None
    timing = settings.get_boolean(["sweep", "timing"])
    original_bpp = settings.get_float(["sweep", "original_bpp"])

    results = app.run_jobs(
        lambda item: evaluate_image(item[0], item[1], config, model, timing, original_bpp),
        corpus,
    )
    print(",".join(("file",) + CSV_HEADER[1:]))
    for (image_id, _), result in zip(corpus, results):
        r = result.report
        print(",".join([
            image_id, format_value(r.bpp), format_value(r.psnr), format_value(r.rmse),
            format_value(r.nrmse), format_value(r.accuracy), format_value(r.cr),
            f"{result.enc_ms:.3f}", f"{result.dec_ms:.3f}",
        ]))
    mean = mean_report([r.report for r in results])
    print(
        f"mean over {len(results)} files: {format_value(mean.bpp)} bpp, "
        f"accuracy {format_value(mean.accuracy)}%, psnr {format_value(mean.psnr)} dB"
    )
    print(f"resources: {monitor.summary()}")
    return 0


def cmd_sweep(app: DepthTcm, args: argparse.Namespace) -> int:
    settings = app.settings
    corpus = _corpus(settings, args.inputs)
    config = CodecConfig.from_settings(settings)
    variable, values = "bits", args.bits_list
    models = None
    if args.lambdas:
        variable, values = "lambda", args.lambdas
        ckpt_dir = pathlib.Path(settings.get(["codec", "checkpoint"]) or ".")
        cache: Dict[float, CodecModel] = {}

        def models(lmbda: float) -> CodecModel:
            if lmbda not in cache:
                path = ckpt_dir / checkpoint_name(lmbda)
                if path.exists():
                    cache[lmbda] = load_checkpoint(path)
                else:
                    cache[lmbda] = _train(settings, corpus, lmbda)
                    save_checkpoint(cache[lmbda], path)
            return cache[lmbda]
    elif config.codec == "learned":
        raise ConfigError("Bit-depth sweeps run the baseline codec; use --lambdas for the learned codec")

    points = rd_sweep(
        corpus, values, config, variable, models,
        timing=settings.get_boolean(["sweep", "timing"]),
        jobs=settings.get_int(["jobs"]),
        original_bpp=settings.get_float(["sweep", "original_bpp"]),
    )
    if args.out:
        path = write_csv(points, args.out)
        print(f"{path}: {len(points)} rows")
    else:
        sys.stdout.write(format_csv(points))
    return 0


def cmd_gen_synthetic(app: DepthTcm, args: argparse.Namespace) -> int:
    settings = app.settings
    if not args.out:
        raise ConfigError("gen-synthetic needs --out <directory>")
    paths = gen_synthetic(
        settings.get_int(["synthetic", "count"]),
        settings.get_int(["synthetic", "seed"]),
        (settings.get_int(["synthetic", "height"]), settings.get_int(["synthetic", "width"])),
        args.out,
        settings.get_float(["synthetic", "valid_fraction"]),
        settings.get_float(["synthetic", "near"]),
        settings.get_float(["synthetic", "far"]),
    )
    print(f"{args.out}: {len(paths)} maps")
    return 0


def cmd_train(app: DepthTcm, args: argparse.Namespace) -> int:
    settings = app.settings
    lmbda = settings.get_float(["train", "lambda"])
    corpus = _corpus(settings, args.inputs)
    model = _train(settings, corpus, lmbda)
    path = save_checkpoint(model, args.out or checkpoint_name(lmbda))
    print(f"{path}: {model.describe()}")
    return 0


def cmd_export_mwd(app: DepthTcm, args: argparse.Namespace) -> int:
    settings = app.settings
    depth = _load(settings, args.input)
    bits = settings.get_int(["codec", "bits"])
    period = settings.get_float(["codec", "period"])
    with file_context(args.input):
        working, _ = prescale_depth(depth, period, bits)
        params = FringeParams.for_depth(working, period)
        image = mwd_encode(working, params, bits)
        if args.quantize:
            image = dequantize_mwd(quantize_mwd(image, (bits, bits, bits)), params)
    out = pathlib.Path(args.out or pathlib.Path(args.input).with_suffix(".mwd.png"))
    save_mwd_png(image, out)
    print(f"{out}: {image.shape[1]}x{image.shape[0]} MWD image")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    _logger.setLevel(logging.INFO)
    app = None
    try:
        app = DepthTcm(resolve_settings(args))
        app.start()
        resolved = app.settings.dump()
        _logger.info(f"Resolved configuration:\n{resolved}")
        print("\n".join(f"# {line}" for line in ["resolved configuration"] + resolved.splitlines()))
        return args.func(app, args)
    except DepthTcmError as e:
        _logger.debug("Command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception:
        _logger.exception(f"Unexpected error running {args.command}")
        return 2
    finally:
        if app is not None:
            app.shutdown()


if __name__ == "__main__":
    sys.exit(main())
