"""Tests for elasticts._cli — CLI entry point."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math

import pytest

from elasticts._cli import _apply_debug_env, _build_parser, _exit_code, _main, _run_dtw
from elasticts._codec import load_model, load_prototypes
from elasticts.const import ETA_GRID, EXIT_DATA, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, FORMAT_VERSION
from elasticts.exceptions import (
    ElasticBandError,
    ElasticConfigError,
    ElasticDivergenceError,
    ElasticFormatError,
)
from elasticts.models import LossKind

# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


@pytest.fixture(autouse=True)
def _no_error_reporting(monkeypatch):
    monkeypatch.delenv("ELASTICTS_SENTRY_DSN", raising=False)
    monkeypatch.delenv("SENTRY_DSN", raising=False)
    monkeypatch.delenv("ELASTICTS_DEBUG", raising=False)


def _make_args(**kwargs) -> argparse.Namespace:
    """Build a Namespace with sensible CLI defaults."""
    defaults = {"seed": 0, "fmt": "json", "out": None, "debug": False, "band": None}
    defaults.update(kwargs)
    return argparse.Namespace(**defaults)


def _dtw_files(tmp_path):
    a = tmp_path / "a.csv"
    a.write_text("1,0.0\n2,1.0,1.0\n", encoding="utf-8")
    b = tmp_path / "b.csv"
    b.write_text("1,1.0,1.0\n", encoding="utf-8")
    return a, b


def _json_out(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


def _split(offset_split) -> list[str]:
    return [str(p) for p in offset_split]


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class TestParser:
    def test_no_command_prints_help(self, capsys):
        assert _main([]) == EXIT_OK
        assert "Commands (grouped)" in capsys.readouterr().out

    def test_missing_positional_is_usage_error(self):
        with pytest.raises(SystemExit) as excinfo:
            _main(["bench"])
        assert excinfo.value.code == EXIT_USAGE

    def test_unknown_loss_is_usage_error(self, offset_split):
        with pytest.raises(SystemExit) as excinfo:
            _main(["bench", str(offset_split[0]), str(offset_split[1]), "--loss", "hinge"])
        assert excinfo.value.code == EXIT_USAGE

    def test_loss_abbreviation(self, offset_split):
        args = _build_parser().parse_args(["sweep", *_split(offset_split), "--loss", "emarg"])
        assert args.loss is LossKind.MARGIN_PERCEPTRON

    def test_defaults(self):
        bench = _build_parser().parse_args(["bench", "a", "b"])
        assert bench.loss is LossKind.LINEAR_SVM
        assert bench.trials == 10
        assert bench.fmt == "json"
        sweep = _build_parser().parse_args(["sweep", "a", "b"])
        assert sweep.loss is LossKind.PERCEPTRON


class TestApplyDebugEnv:
    def test_sets_debug_from_env(self, monkeypatch):
        monkeypatch.setenv("ELASTICTS_DEBUG", "1")
        args = _make_args()
        _apply_debug_env(args)
        assert args.debug is True

    def test_cli_debug_kept_without_env(self):
        args = _make_args(debug=True)
        _apply_debug_env(args)
        assert args.debug is True

    def test_debug_stays_false_when_env_empty(self, monkeypatch):
        monkeypatch.setenv("ELASTICTS_DEBUG", "")
        args = _make_args()
        _apply_debug_env(args)
        assert args.debug is False


class TestExitCode:
    def test_mapping(self):
        assert _exit_code(ElasticDivergenceError("x")) == EXIT_NUMERICAL
        assert _exit_code(ElasticFormatError("x")) == EXIT_DATA
        assert _exit_code(ElasticBandError("x")) == EXIT_DATA
        assert _exit_code(ElasticConfigError("x")) == EXIT_USAGE


# ---------------------------------------------------------------------------
# dtw
# ---------------------------------------------------------------------------


class TestRunDtw:
    async def test_prints_distance_matrix(self, tmp_path, capsys):
        a, b = _dtw_files(tmp_path)
        await _run_dtw(_make_args(file_a=str(a), file_b=str(b)))
        payload = _json_out(capsys)
        assert payload["format_version"] == FORMAT_VERSION
        assert payload["band"] is None
        assert payload["distances"][0][0] == pytest.approx(math.sqrt(2.0))
        assert payload["distances"][1][0] == 0.0

    def test_csv(self, tmp_path, capsys):
        a, b = _dtw_files(tmp_path)
        assert _main(["dtw", str(a), str(b), "--format", "csv"]) == EXIT_OK
        rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
        assert [float(r[0]) for r in rows] == pytest.approx([math.sqrt(2.0), 0.0])

    def test_infeasible_band_exits_2(self, tmp_path, capsys):
        a, b = _dtw_files(tmp_path)
        assert _main(["dtw", str(a), str(b), "--band", "0"]) == EXIT_DATA
        assert "error:" in capsys.readouterr().err

    def test_missing_file_exits_2(self, tmp_path, capsys):
        assert _main(["dtw", str(tmp_path / "nope.csv"), str(tmp_path / "nope.csv")]) == EXIT_DATA
        assert "cannot read dataset" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# train / eval
# ---------------------------------------------------------------------------


class TestTrainEval:
    def test_round_trip(self, offset_split, tmp_path, capsys):
        model_path = tmp_path / "offset.elts"
        train_file = str(offset_split[0])
        code = _main(
            ["train", train_file, "--loss", "eperc", "--eta", "1.0", "--model", str(model_path)]
        )
        assert code == EXIT_OK
        summary = _json_out(capsys)
        assert summary["dataset"] == "Offset"
        assert summary["classifier"] == "ePERC"
        assert summary["train_error"] == 0.0
        assert summary["params"]["learning_rate"] == 1.0
        assert summary["params"]["elasticity"] == 1
        assert len(summary["loss_trace"]) == summary["epochs_run"]

        model = load_model(model_path)
        assert model.label_codes == ("1", "2")
        assert _main(["eval", str(model_path), str(offset_split[1])]) == EXIT_OK
        result = _json_out(capsys)
        assert result["error_rate"] == 0.0
        assert result["examples"] == 6

    def test_summary_to_file(self, offset_split, tmp_path, capsys):
        out = tmp_path / "summary.json"
        args = ["train", str(offset_split[0]), "--loss", "eperc", "--eta", "0.5", "--out", str(out)]
        assert _main(args) == EXIT_OK
        assert capsys.readouterr().out == ""
        assert json.loads(out.read_text(encoding="utf-8"))["classifier"] == "ePERC"

    def test_divergence_exits_3(self, offset_split, capsys):
        train_file = str(offset_split[0])
        code = _main(["train", train_file, "--loss", "elsvm", "--eta", "1e12", "--lambda", "0"])
        assert code == EXIT_NUMERICAL
        err = capsys.readouterr().err
        assert "divergence radius" in err or "non-finite" in err

    def test_margin_without_eta_is_kept(self, offset_split, capsys):
        args = ["train", str(offset_split[0]), "--loss", "emarg", "--margin", "0.5"]
        assert _main([*args, "--max-epochs", "5"]) == EXIT_OK
        params = _json_out(capsys)["params"]
        assert params["margin"] == 0.5
        assert params["learning_rate"] in ETA_GRID

    def test_lambda_and_eta_are_kept(self, offset_split, capsys):
        args = ["train", str(offset_split[0]), "--loss", "elsvm", "--eta", "0.5"]
        assert _main([*args, "--lambda", "0.125", "--max-epochs", "5"]) == EXIT_OK
        params = _json_out(capsys)["params"]
        assert params["learning_rate"] == 0.5
        assert params["regularization"] == 0.125

    def test_eval_garbage_model_exits_2(self, offset_split, tmp_path):
        bad = tmp_path / "bad.elts"
        bad.write_bytes(b"garbage")
        assert _main(["eval", str(bad), str(offset_split[1])]) == EXIT_DATA


# ---------------------------------------------------------------------------
# mean
# ---------------------------------------------------------------------------


class TestRunMean:
    def test_class_mean(self, offset_split, capsys):
        assert _main(["mean", str(offset_split[0]), "--class", "2"]) == EXIT_OK
        payload = _json_out(capsys)
        assert payload["series"] == 6
        assert (payload["n"], payload["m"]) == (4, 4)
        assert payload["variation"] <= payload["variation_trace"][0]

    def test_prototypes_file(self, offset_split, tmp_path, capsys):
        path = tmp_path / "mean.elts"
        args = ["mean", str(offset_split[0]), "--class", "1", "--elasticity", "2"]
        assert _main([*args, "--prototypes", str(path)]) == EXIT_OK
        prototypes = load_prototypes(path)
        assert prototypes.labels == [1]
        assert prototypes.prototypes[0].shape == (4, 2)

    def test_unknown_class_exits_2(self, offset_split, capsys):
        assert _main(["mean", str(offset_split[0]), "--class", "7"]) == EXIT_DATA


# ---------------------------------------------------------------------------
# bench / sweep / nn
# ---------------------------------------------------------------------------


class TestExperiments:
    def test_bench_json(self, offset_split, capsys):
        args = ["bench", *_split(offset_split), "--loss", "eperc", "--trials", "2", "--seed", "5"]
        assert _main(args) == EXIT_OK
        payload = _json_out(capsys)
        assert payload["classifier"] == "ePERC"
        assert payload["seed"] == 5
        assert len(payload["trials"]) == 2
        assert 0.0 <= payload["mean"] <= 1.0
        assert payload["config"]["trials"] == 2

    def test_bench_csv_to_file(self, offset_split, tmp_path, capsys):
        out = tmp_path / "bench.csv"
        args = ["bench", *_split(offset_split), "--loss", "eperc", "--trials", "1"]
        assert _main([*args, "--format", "csv", "--out", str(out)]) == EXIT_OK
        rows = list(csv.reader(io.StringIO(out.read_text(encoding="utf-8"))))
        assert rows[0][0] == "dataset"
        assert [r[2] for r in rows[1:]] == ["trial", "summary"]

    def test_unwritable_out_exits_2(self, offset_split, tmp_path):
        args = ["nn", *_split(offset_split), "--out", str(tmp_path / "no" / "r.json")]
        assert _main(args) == EXIT_DATA

    def test_sweep(self, offset_split, capsys):
        args = ["sweep", *_split(offset_split), "--trials", "1", "--max-epochs", "5"]
        assert _main(args) == EXIT_OK
        rows = _json_out(capsys)["rows"]
        assert len(rows) == 11
        assert [r["w"] for r in rows] == sorted(r["w"] for r in rows)
        assert rows[0]["m"] == 1

    @pytest.mark.parametrize("mode", ["all", "kme", "ahc"])
    def test_nn(self, offset_split, capsys, mode):
        assert _main(["nn", str(offset_split[0]), str(offset_split[1]), "--mode", mode]) == EXIT_OK
        payload = _json_out(capsys)
        assert payload["classifier"] == f"NN+{mode.upper()}"
        assert payload["trials"] == [0.0]

    def test_bench_missing_file_exits_2(self, offset_split, tmp_path, capsys):
        assert _main(["bench", str(tmp_path / "missing.tsv"), str(offset_split[1])]) == EXIT_DATA
        assert capsys.readouterr().err.startswith("error:")
