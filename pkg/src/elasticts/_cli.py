"""
elasticts._cli — CLI entry point for the elasticts package.

Exposes DTW, training and evaluation of elastic linear classifiers, means,
the elasticity sweep, nearest-neighbour baselines and the full benchmark
protocol on UCR-style two-class datasets.
"""

from __future__ import annotations

import argparse
import asyncio
from dataclasses import replace
import json
import logging
import os
from pathlib import Path
import sys
from typing import Any, NoReturn

import numpy as np

from elasticts._codec import load_model, save_model, save_prototypes
from elasticts.centroid import compute_mean
from elasticts.const import (
    DEFAULT_JOBS,
    DEFAULT_MAX_EPOCHS,
    DEFAULT_TRIALS,
    EXIT_DATA,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_USAGE,
    FORMAT_VERSION,
    FULL_PROTOCOL_TRIALS,
    MEAN_MAX_ITER,
    MEAN_TOL,
    SWEEP_REPEATS,
)
from elasticts.datasets import load_dataset, read_series
from elasticts.error_reporting import init_error_reporting, report_run_failure
from elasticts.exceptions import (
    ElasticConfigError,
    ElasticDataError,
    ElasticError,
    ElasticNumericalError,
    ElasticPathError,
)
from elasticts.experiment import (
    Stage,
    derive_seed,
    elasticity_sweep,
    emit_report,
    grid_search,
    nn_experiment,
    resolve_elasticity,
    run_experiment,
)
from elasticts.learn import error_rate, train
from elasticts.models import (
    ClassifierModel,
    ElasticParams,
    ExperimentConfig,
    LossKind,
    MeanConfig,
    NNMode,
    PrototypeSet,
    Schedule,
)
from elasticts.warping import dtw_distance

_CLI_EPILOG = """
Commands (grouped)
──────────────────

Distances
  dtw           DTW distances between the series of two files.

Elastic linear classifiers
  train         Train one classifier (grid search over hyperparameters not given).
  eval          Test error of a saved classifier.
  bench         Grid search + repeated trials, mean +- std test error.
  sweep         Test error as a function of the elasticity ratio w = m/n.

Means and nearest neighbours
  mean          Mean matrix (and variation) of the series in a file.
  nn            NN+ALL / NN+KME / NN+AHC baselines.

Common options
  --elasticity-ratio W  m = max(1, ceil(W * n)); W = 0 means m = 1.
  --elasticity M        Explicit m (wins over the ratio).
  --seed N              Master seed (default: 0).
  --trials N            Trials / sweep repeats (default: 10).
  --format F            json (default) or csv.
  --band R              Sakoe-Chiba radius for DTW.
  --jobs N              Concurrent work units (default: 4).
  --debug               Verbose logging. Also ELASTICTS_DEBUG=1.

Exit codes
  0 success, 1 usage error, 2 data error, 3 numerical failure.

Examples
  elasticts dtw a.tsv b.tsv --band 5
  elasticts bench Coffee_TRAIN.tsv Coffee_TEST.tsv --loss elsvm
  elasticts bench ECG200_TRAIN.tsv ECG200_TEST.tsv --loss elogr --full-protocol
  elasticts sweep Coffee_TRAIN.tsv Coffee_TEST.tsv --format csv
  elasticts nn Coffee_TRAIN.tsv Coffee_TEST.tsv --mode all
  elasticts train Coffee_TRAIN.tsv --loss eperc --eta 0.01 --model coffee.elts
  elasticts eval coffee.elts Coffee_TEST.tsv
"""


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with ``EXIT_USAGE``."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _loss_arg(text: str) -> LossKind:
    try:
        return LossKind.parse(text)
    except ElasticConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_common_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="Master seed (default: 0).")
    parser.add_argument(
        "--format",
        choices=("json", "csv"),
        default="json",
        dest="fmt",
        help="Output format (default: json).",
    )
    parser.add_argument(
        "--out", type=str, default=None, help="Write the output to FILE (default: stdout)."
    )
    parser.add_argument(
        "--debug", action="store_true", help="Verbose logging. Also set by ELASTICTS_DEBUG=1."
    )


def _add_elasticity_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--elasticity-ratio", type=float, default=None, metavar="W", help="m = max(1, ceil(W * n))."
    )
    parser.add_argument(
        "--elasticity", type=int, default=None, metavar="M", help="Explicit elasticity m."
    )


def _add_training_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--max-epochs", type=int, default=DEFAULT_MAX_EPOCHS, help="Epoch cap (default: 50)."
    )
    parser.add_argument(
        "--schedule",
        choices=[s.value for s in Schedule],
        default=Schedule.CONSTANT.value,
        help="Learning-rate schedule.",
    )
    parser.add_argument(
        "--jobs", type=int, default=DEFAULT_JOBS, help="Concurrent work units (default: 4)."
    )
    parser.add_argument("--z-normalize", action="store_true", help="Z-normalize every series.")


def _add_experiment_args(parser: argparse.ArgumentParser, default_loss: LossKind) -> None:
    parser.add_argument("train_file", help="Training split.")
    parser.add_argument("test_file", help="Test split.")
    _add_common_args(parser)
    _add_elasticity_args(parser)
    parser.add_argument(
        "--loss",
        type=_loss_arg,
        default=default_loss,
        help=(
            "perceptron|margin_perceptron|logistic|linear_svm or eperc|emarg|elogr|elsvm "
            f"(default: {default_loss.value})."
        ),
    )
    parser.add_argument(
        "--trials", type=int, default=DEFAULT_TRIALS, help="Independent trials (default: 10)."
    )
    parser.add_argument(
        "--full-protocol",
        action="store_true",
        help="Use the published trial counts (100 trials, 30 sweep repeats).",
    )
    _add_training_args(parser)
    parser.add_argument("--band", type=int, default=None, help="Sakoe-Chiba radius for NN+ALL.")


def _apply_debug_env(args: argparse.Namespace) -> None:
    if os.environ.get("ELASTICTS_DEBUG", "").strip().lower() in ("1", "true", "yes"):
        args.debug = True


def _config_from_args(args: argparse.Namespace, trials: int | None = None) -> ExperimentConfig:
    return ExperimentConfig(
        train_path=args.train_file,
        test_path=args.test_file,
        classifier=args.loss,
        elasticity_ratio=args.elasticity_ratio,
        elasticity=args.elasticity,
        trials=trials if trials is not None else args.trials,
        master_seed=args.seed,
        max_epochs=args.max_epochs,
        schedule=Schedule(args.schedule),
        z_normalize=args.z_normalize,
        jobs=args.jobs,
        band=args.band,
        nn_mode=NNMode(getattr(args, "mode", NNMode.ALL.value)),
    )


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ElasticDataError(f"cannot write {out}: {exc.strerror or exc}") from exc


def _dump(payload: dict[str, Any], out: str | None = None) -> None:
    text = json.dumps({"format_version": FORMAT_VERSION, **payload}, sort_keys=True, indent=2)
    _write(text + "\n", out)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="elasticts",
        description=(
            "Elastic linear classifiers, means and NN baselines under dynamic time warping."
        ),
        epilog=_CLI_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subparsers = parser.add_subparsers(
        dest="command",
        title="commands",
        description="Distances, classifiers, means, NN baselines and benchmarks.",
    )

    # ----- Distances -----
    dtw_parser = subparsers.add_parser(
        "dtw", help="DTW distances between the series of two files."
    )
    dtw_parser.add_argument("file_a", help="Dataset file A.")
    dtw_parser.add_argument("file_b", help="Dataset file B.")
    dtw_parser.add_argument("--band", type=int, default=None, help="Sakoe-Chiba radius.")
    _add_common_args(dtw_parser)

    # ----- Classifiers -----
    train_parser = subparsers.add_parser("train", help="Train one elastic linear classifier.")
    train_parser.add_argument("train_file", help="Training split.")
    _add_common_args(train_parser)
    _add_elasticity_args(train_parser)
    train_parser.add_argument(
        "--loss", type=_loss_arg, default=LossKind.LINEAR_SVM, help="Loss (default: linear_svm)."
    )
    train_parser.add_argument(
        "--eta", type=float, default=None, help="Learning rate (default: grid search)."
    )
    train_parser.add_argument(
        "--margin", type=float, default=None, help="Margin xi (default: grid search)."
    )
    train_parser.add_argument(
        "--lambda",
        type=float,
        default=None,
        dest="regularization",
        help="Regularization (default: grid search).",
    )
    _add_training_args(train_parser)
    train_parser.add_argument(
        "--model", type=str, default=None, help="Save the trained model to FILE."
    )

    eval_parser = subparsers.add_parser("eval", help="Test error of a saved classifier.")
    eval_parser.add_argument("model_file", help="Model container written by 'train --model'.")
    eval_parser.add_argument("test_file", help="Test split.")
    eval_parser.add_argument("--z-normalize", action="store_true", help="Z-normalize every series.")
    _add_common_args(eval_parser)

    bench_parser = subparsers.add_parser(
        "bench", help="Grid search + repeated trials on a train/test split."
    )
    _add_experiment_args(bench_parser, LossKind.LINEAR_SVM)

    sweep_parser = subparsers.add_parser("sweep", help="Test error versus elasticity ratio.")
    _add_experiment_args(sweep_parser, LossKind.PERCEPTRON)

    # ----- Means and nearest neighbours -----
    mean_parser = subparsers.add_parser("mean", help="Mean matrix of the series in a file.")
    mean_parser.add_argument("data_file", help="Dataset file.")
    mean_parser.add_argument(
        "--class", type=str, default=None, dest="label", help="Only series with this raw label."
    )
    _add_common_args(mean_parser)
    mean_parser.add_argument(
        "--elasticity", type=int, default=None, metavar="M", help="Columns m (default: n)."
    )
    mean_parser.add_argument("--eta", type=float, default=None, help="Step size (default: 1/N).")
    mean_parser.add_argument(
        "--max-iter", type=int, default=MEAN_MAX_ITER, help="Iteration cap (default: 50)."
    )
    mean_parser.add_argument(
        "--tol", type=float, default=MEAN_TOL, help="Relative stopping tolerance."
    )
    mean_parser.add_argument(
        "--prototypes", type=str, default=None, help="Save the mean as a prototype container."
    )

    nn_parser = subparsers.add_parser("nn", help="Nearest-neighbour baselines.")
    _add_experiment_args(nn_parser, LossKind.LINEAR_SVM)
    nn_parser.add_argument(
        "--mode",
        choices=[m.value for m in NNMode],
        default=NNMode.ALL.value,
        help="Prototype mode (default: all).",
    )
    return parser


# ----- Handlers -----


async def _run_dtw(args: argparse.Namespace) -> None:
    _, series_a = read_series(args.file_a)
    _, series_b = read_series(args.file_b)
    distances = [[dtw_distance(a, b, args.band) for b in series_b] for a in series_a]
    if args.fmt == "csv":
        lines = [",".join(repr(d) for d in row) for row in distances]
        _write("\n".join(lines) + "\n", args.out)
    else:
        _dump({"band": args.band, "distances": distances}, args.out)


async def _run_train(args: argparse.Namespace) -> None:
    dataset = load_dataset(args.train_file, z_normalized=args.z_normalize)
    n = dataset.max_length
    m = resolve_elasticity(n, args.elasticity_ratio, args.elasticity)
    kind: LossKind = args.loss
    # A given value pins its axis to one point; the other axes keep their full grid.
    given = {"eta_grid": args.eta, "margin_grid": args.margin, "lambda_grid": args.regularization}
    fixed: dict[str, Any] = {axis: (value,) for axis, value in given.items() if value is not None}
    config = ExperimentConfig(
        train_path=args.train_file,
        test_path=args.train_file,
        classifier=kind,
        master_seed=args.seed,
        max_epochs=args.max_epochs,
        schedule=Schedule(args.schedule),
        jobs=args.jobs,
        **fixed,
    )
    selection = await grid_search(dataset, kind, config, m)
    # Same seeds as trial 0 of ``bench``.
    hyper = replace(selection.best, shuffle_seed=derive_seed(args.seed, Stage.TRIAL, 0, 1))
    rng = np.random.default_rng(derive_seed(args.seed, Stage.TRIAL, 0, 0))
    theta0 = ElasticParams.initialize(n, m, rng)
    theta, report = train(theta0, dataset, kind, hyper)
    if args.model:
        save_model(args.model, ClassifierModel(theta, kind, dataset.label_codes))
    _dump(
        {
            "dataset": dataset.name,
            "classifier": kind.abbreviation,
            "params": {**hyper.to_dict(), "elasticity": m, "n": n},
            "epochs_run": report.epochs_run,
            "updates_applied": report.updates_applied,
            "train_error": report.final_train_error_rate,
            "loss_trace": report.loss_trace,
            "seed": args.seed,
        },
        args.out,
    )


async def _run_eval(args: argparse.Namespace) -> None:
    model = load_model(args.model_file)
    dataset = load_dataset(
        args.test_file, label_codes=model.label_codes, z_normalized=args.z_normalize
    )
    _dump(
        {
            "dataset": dataset.name,
            "classifier": model.loss.abbreviation,
            "error_rate": error_rate(model.theta, dataset),
            "examples": len(dataset),
        },
        args.out,
    )


async def _run_mean(args: argparse.Namespace) -> None:
    raw, series = read_series(args.data_file)
    if args.label is not None:
        wanted = float(args.label)
        series = [x for x, label in zip(series, raw, strict=True) if float(label) == wanted]
        if not series:
            raise ElasticDataError(f"no series with label {args.label!r} in {args.data_file}")
    config = MeanConfig(
        eta=args.eta, max_iter=args.max_iter, tol=args.tol, elasticity=args.elasticity
    )
    state = compute_mean(series, config)
    if args.prototypes:
        label = int(float(args.label)) if args.label is not None else 0
        prototypes = PrototypeSet(mode=NNMode.KME, labels=[label], prototypes=[state.Y])
        save_prototypes(args.prototypes, prototypes)
    _dump(
        {
            "series": len(series),
            "n": int(state.Y.shape[0]),
            "m": int(state.Y.shape[1]),
            "variation": state.variation,
            "iterations": state.iterations,
            "variation_trace": state.variation_trace,
        },
        args.out,
    )


async def _run_bench(args: argparse.Namespace) -> None:
    config = _config_from_args(args, FULL_PROTOCOL_TRIALS if args.full_protocol else None)
    report = await run_experiment(config)
    _write(emit_report(report, args.fmt), args.out)


async def _run_sweep(args: argparse.Namespace) -> None:
    config = _config_from_args(args, SWEEP_REPEATS if args.full_protocol else None)
    report = await elasticity_sweep(config)
    _write(emit_report(report, args.fmt), args.out)


async def _run_nn(args: argparse.Namespace) -> None:
    report = await nn_experiment(_config_from_args(args))
    _write(emit_report(report, args.fmt), args.out)


def _exit_code(exc: ElasticError) -> int:
    if isinstance(exc, ElasticNumericalError):
        return EXIT_NUMERICAL
    if isinstance(exc, ElasticDataError | ElasticPathError):
        return EXIT_DATA
    return EXIT_USAGE


def _main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_OK

    _apply_debug_env(args)

    if getattr(args, "debug", False):
        logging.basicConfig(level=logging.DEBUG, format="%(name)s %(levelname)s %(message)s")
    else:
        logging.basicConfig(level=logging.WARNING, format="%(message)s")

    init_error_reporting()

    handlers = {
        "dtw": _run_dtw,
        "train": _run_train,
        "eval": _run_eval,
        "mean": _run_mean,
        "bench": _run_bench,
        "sweep": _run_sweep,
        "nn": _run_nn,
    }
    handler = handlers.get(args.command)
    if handler is None:
        parser.print_help()
        return EXIT_USAGE
    try:
        asyncio.run(handler(args))
    except ElasticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc, ElasticNumericalError):
            context = {
                k: v for k, v in vars(args).items() if isinstance(v, str | int | float | bool)
            }
            report_run_failure(exc, context)
        return _exit_code(exc)
    return EXIT_OK


def main() -> None:
    sys.exit(_main())
