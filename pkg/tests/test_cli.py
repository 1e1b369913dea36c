# -*- coding: utf-8 -*-
import csv
import io

import numpy as np
import pytest
from PIL import Image

from depthtcm.cli import build_parser, checkpoint_name, main, resolve_settings
from depthtcm.pipeline.constants import CSV_HEADER
from depthtcm.pipeline.container import decode_file
from depthtcm.pipeline.ingest import load_raw


@pytest.fixture
def corpus_dir(tmp_path):
    out = tmp_path / "corpus"
    assert main(["gen-synthetic", "--count", "2", "--height", "24", "--width", "32",
                 "--seed", "3", "--out", str(out)]) == 0
    return out


def _body(text):
    # drop the resolved configuration banner
    return [line for line in text.splitlines() if not line.startswith("#")]


def test_parser_commands():
    parser = build_parser()
    for command in ("encode", "decode", "eval", "sweep", "gen-synthetic", "train", "export-mwd"):
        args = parser.parse_args([command] + (["x"] if command in ("encode", "decode", "eval", "export-mwd") else []))
        assert args.command == command


def test_bits_choices():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["encode", "x", "--bits", "9"])


def test_flags_override_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("codec.bits=5\njobs=2\n", encoding="utf-8")
    args = build_parser().parse_args(["eval", "x", "--config", str(cfg), "--bits", "3",
                                      "--seed", "9", "--no-timing"])
    settings = resolve_settings(args)
    assert settings.get_int("codec.bits") == 3
    assert settings.get_int("jobs") == 2
    assert settings.get_int("train.seed") == settings.get_int("synthetic.seed") == 9
    assert settings.get_boolean("sweep.timing") is False


def test_checkpoint_name():
    assert checkpoint_name(.05) == "model_lambda0.05.ckpt"
    assert checkpoint_name(1.) == "model_lambda1.ckpt"


def test_gen_synthetic(capsys, corpus_dir):
    assert sorted(p.name for p in corpus_dir.glob("*.raw")) == ["synthetic_0000.raw", "synthetic_0001.raw"]
    assert "# resolved configuration" in capsys.readouterr().out


def test_encode_decode(tmp_path, corpus_dir):
    source = corpus_dir / "synthetic_0000.raw"
    packed = tmp_path / "map.dtcm"
    restored = tmp_path / "map.raw"
    assert main(["encode", str(source), "--bits", "5", "--out", str(packed)]) == 0
    assert main(["decode", str(packed), "--out", str(restored)]) == 0
    decoded = decode_file(packed.read_bytes())
    assert decoded.header.bits == (5, 5, 5)
    loaded = load_raw(restored)
    np.testing.assert_array_equal(loaded.valid, load_raw(source).valid)
    np.testing.assert_allclose(loaded.values, decoded.depth.values, rtol=1e-6)


def test_eval_prints_rows(corpus_dir, capsys):
    capsys.readouterr()
    assert main(["eval", str(corpus_dir), "--no-timing"]) == 0
    lines = _body(capsys.readouterr().out)
    assert lines[0].split(",")[0] == "file"
    assert lines[1].endswith(",0.000,0.000")
    assert lines[3].startswith("mean over 2 files")
    assert lines[4].startswith("resources: cpu")


def test_sweep_csv(tmp_path, corpus_dir):
    out = tmp_path / "rd.csv"
    assert main(["sweep", str(corpus_dir), "--bits-list", "4,8", "--no-timing", "--out", str(out)]) == 0
    rows = list(csv.reader(io.StringIO(out.read_text(encoding="utf-8"))))
    assert tuple(rows[0]) == CSV_HEADER
    assert [r[0] for r in rows[1:]] == ["4", "8"]


def test_learned_bits_sweep_rejected(capsys):
    code = main(["sweep", "--codec", "learned", "--count", "1", "--height", "16", "--width", "16"])
    assert code == 1
    err = capsys.readouterr().err
    assert any(line.startswith("error:") for line in err.splitlines())


def test_missing_input(tmp_path, capsys):
    assert main(["encode", str(tmp_path / "absent.raw")]) == 1
    err = capsys.readouterr().err
    assert "error:" in err and "absent.raw" in err


def test_gen_synthetic_needs_out(capsys):
    assert main(["gen-synthetic", "--count", "1"]) == 1
    assert "--out" in capsys.readouterr().err


def test_export_mwd(tmp_path, corpus_dir):
    out = tmp_path / "mwd.png"
    assert main(["export-mwd", str(corpus_dir / "synthetic_0001.raw"), "--quantize", "--out", str(out)]) == 0
    with Image.open(out) as img:
        assert img.mode == "RGB"
        assert img.size == (32, 24)
