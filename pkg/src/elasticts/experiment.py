"""
elasticts.experiment — Model selection and benchmark orchestration.

The protocol for an elastic linear classifier on a two-class problem:

1. Load the train/test split; the elasticity ``m`` follows from the longest
   training series (``ceil(n / 10)`` unless set otherwise).
2. Pick hyperparameters on the training split by cross-validated grid search
   (stratified 10-fold above 30 examples, leave-one-out otherwise).
3. Train and test ``trials`` times with the selected hyperparameters; trials
   differ only in their initialisation and shuffle seeds.

Independent units (grid point x fold, trials, sweep repeats) run
concurrently in the default thread pool, at most ``config.jobs`` at a time.
Every unit seeds its own generator from
``SeedSequence(master_seed, spawn_key=(stage, *index))`` and results are
collected by index, so reports do not depend on scheduling.
"""

from __future__ import annotations

import asyncio
import csv
import enum
from functools import partial
import io
import json
import logging
import math
from pathlib import Path
import time
from typing import TYPE_CHECKING, Any, TypeVar

import numpy as np

from .centroid import ahc_prototypes, kme_prototypes, nn_classify
from .const import DEFAULT_ELASTICITY_RATIO, FORMAT_VERSION, SWEEP_ETAS, SWEEP_RATIOS
from .datasets import load_dataset, make_folds
from .exceptions import (
    ElasticConfigError,
    ElasticDataError,
    ElasticDivergenceError,
    ElasticLengthError,
)
from .learn import error_rate, train
from .models import (
    Dataset,
    ElasticParams,
    ErrorReport,
    ExperimentConfig,
    GridSearchResult,
    Hyperparams,
    LossKind,
    MeanConfig,
    NNMode,
    PrototypeSet,
    SweepReport,
    SweepRow,
    summarize,
)

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

logger = logging.getLogger(__name__)

T = TypeVar("T")


class Stage(enum.IntEnum):
    """First spawn-key element of every derived seed."""

    TRIAL = 1
    FOLD = 2
    GRID = 3
    SWEEP = 4


def derive_seed(master_seed: int, stage: Stage, *index: int) -> int:
    """32-bit seed for the unit ``(stage, *index)`` of an experiment."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(int(stage), *index))
    return int(seq.generate_state(1)[0])


def resolve_elasticity(n: int, ratio: float | None = None, m: int | None = None) -> int:
    """
    Column count ``m`` for series of length up to ``n``.

    An explicit ``m`` wins; a ratio ``w`` gives ``max(1, ceil(w * n))`` with
    ``w = 0`` meaning ``m = 1``. Without either, ``w = DEFAULT_ELASTICITY_RATIO``.
    """
    if m is not None:
        if m < 1:
            raise ElasticConfigError(f"elasticity must be >= 1, got {m}")
        return int(m)
    if ratio is None:
        ratio = DEFAULT_ELASTICITY_RATIO
    if ratio < 0:
        raise ElasticConfigError(f"elasticity ratio must be >= 0, got {ratio}")
    # round() drops float noise such as 0.3 * 10 = 3.0000000000000004
    return max(1, math.ceil(round(ratio * n, 9)))


async def _fan_out(jobs: int, tasks: Sequence[Callable[[], T]]) -> list[T]:
    """Run blocking callables in the default executor, ``jobs`` at a time, results in order."""
    semaphore = asyncio.Semaphore(jobs)
    loop = asyncio.get_running_loop()

    async def run_one(task: Callable[[], T]) -> T:
        async with semaphore:
            return await loop.run_in_executor(None, task)

    return list(await asyncio.gather(*(run_one(task) for task in tasks)))


def _load_split(config: ExperimentConfig) -> tuple[Dataset, Dataset]:
    train_set = load_dataset(config.train_path, z_normalized=config.z_normalize)
    test_set = load_dataset(
        config.test_path,
        label_codes=train_set.label_codes,
        z_normalized=config.z_normalize,
        name=train_set.name,
    )
    if test_set.max_length > train_set.max_length:
        raise ElasticLengthError(
            f"{train_set.name}: test series of length {test_set.max_length} exceed the "
            f"longest training series ({train_set.max_length})"
        )
    return train_set, test_set


def _fit_and_score(
    train_set: Dataset,
    test_set: Dataset,
    kind: LossKind,
    hyper: Hyperparams,
    m: int,
    init_seed: int,
) -> float:
    theta0 = ElasticParams.initialize(train_set.max_length, m, np.random.default_rng(init_seed))
    theta, _ = train(theta0, train_set, kind, hyper)
    return error_rate(theta, test_set)


# ---------------------------------------------------------------------------
# Grid search
# ---------------------------------------------------------------------------


def grid_points(kind: LossKind, config: ExperimentConfig) -> list[dict[str, float]]:
    """Grid of the loss, ordered by learning rate then margin / regularization."""
    etas = sorted(config.eta_grid)
    if kind is LossKind.MARGIN_PERCEPTRON:
        margins = sorted(config.margin_grid)
        return [{"learning_rate": e, "margin": xi} for e in etas for xi in margins]
    if kind is LossKind.LINEAR_SVM:
        lambdas = sorted(config.lambda_grid)
        return [{"learning_rate": e, "regularization": lam} for e in etas for lam in lambdas]
    return [{"learning_rate": e} for e in etas]


def _hyperparams(
    point: dict[str, float], config: ExperimentConfig, shuffle_seed: int
) -> Hyperparams:
    return Hyperparams(
        learning_rate=point["learning_rate"],
        margin=point.get("margin", 0.0),
        regularization=point.get("regularization", 0.0),
        max_epochs=config.max_epochs,
        schedule=config.schedule,
        shuffle_seed=shuffle_seed,
    )


async def grid_search(
    dataset: Dataset, kind: LossKind, config: ExperimentConfig, m: int
) -> GridSearchResult:
    """
    Cross-validated grid search on ``dataset``.

    Every grid point sees the same folds and, per fold, the same init and
    shuffle seeds. A point whose training diverges on any fold scores
    ``inf``. The lowest mean validation error wins; ties go to the smaller
    learning rate, then the smaller margin or regularization.
    """
    points = grid_points(kind, config)
    if len(points) == 1:
        logger.debug("Single grid point %s; skipping cross-validation", points[0])
        return GridSearchResult(best=_hyperparams(points[0], config, 0))

    master = config.master_seed
    folds = make_folds(dataset, derive_seed(master, Stage.FOLD))
    fold_sets = [(dataset.subset(tr), dataset.subset(va)) for tr, va in folds]
    n = dataset.max_length

    def unit(point: dict[str, float], f_idx: int) -> Callable[[], float]:
        def run() -> float:
            tr, va = fold_sets[f_idx]
            hyper = _hyperparams(point, config, derive_seed(master, Stage.GRID, f_idx, 1))
            rng = np.random.default_rng(derive_seed(master, Stage.GRID, f_idx, 0))
            theta0 = ElasticParams.initialize(n, m, rng)
            try:
                theta, _ = train(theta0, tr, kind, hyper)
            except ElasticDivergenceError as exc:
                logger.warning("Grid point %s diverged on fold %d: %s", point, f_idx, exc)
                return math.inf
            return error_rate(theta, va)

        return run

    n_folds = len(fold_sets)
    errors = await _fan_out(config.jobs, [unit(p, f) for p in points for f in range(n_folds)])
    scores: list[tuple[dict[str, float], float]] = []
    for p_idx, point in enumerate(points):
        fold_errors = errors[p_idx * n_folds : (p_idx + 1) * n_folds]
        diverged = any(math.isinf(e) for e in fold_errors)
        score = math.inf if diverged else float(np.mean(fold_errors))
        logger.debug("Grid point %s: CV error %.6g", point, score)
        scores.append((point, score))

    best_idx = min(range(len(scores)), key=lambda i: (scores[i][1], i))
    best_point, best_score = scores[best_idx]
    if math.isinf(best_score):
        raise ElasticDivergenceError(f"{dataset.name}: training diverged at every grid point")
    logger.info(
        "%s %s: selected %s (CV error %.4f)",
        dataset.name,
        kind.abbreviation,
        best_point,
        best_score,
    )
    return GridSearchResult(best=_hyperparams(best_point, config, 0), scores=scores)


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------


async def run_experiment(config: ExperimentConfig) -> ErrorReport:
    """
    Grid search once, then ``config.trials`` independent train/test runs.

    Raises:
        ElasticDataError: loader errors.
        ElasticDivergenceError: a trial diverged (dataset and trial in the message).
    """
    started = time.monotonic()
    train_set, test_set = _load_split(config)
    n = train_set.max_length
    m = resolve_elasticity(n, config.elasticity_ratio, config.elasticity)
    kind = config.classifier

    master = config.master_seed

    selection = await grid_search(train_set, kind, config, m)
    selected_at = time.monotonic()
    point = _point_of(selection.best)

    def trial(t: int) -> Callable[[], float]:
        def run() -> float:
            hyper = _hyperparams(point, config, derive_seed(master, Stage.TRIAL, t, 1))
            init_seed = derive_seed(master, Stage.TRIAL, t, 0)
            try:
                return _fit_and_score(train_set, test_set, kind, hyper, m, init_seed)
            except ElasticDivergenceError as exc:
                raise ElasticDivergenceError(
                    f"{train_set.name} trial {t}: {exc}", norm=exc.norm, radius=exc.radius
                ) from exc

        return run

    rates = await _fan_out(config.jobs, [trial(t) for t in range(config.trials)])
    finished = time.monotonic()
    params: dict[str, Any] = {**point, "elasticity": m, "n": n}
    logger.info(
        "%s %s: mean test error %.4f over %d trials",
        train_set.name,
        kind.abbreviation,
        float(np.mean(rates)),
        len(rates),
    )
    return ErrorReport.from_rates(
        train_set.name,
        kind.abbreviation,
        rates,
        params=params,
        seed=config.master_seed,
        config=config.to_dict(),
        timings={
            "grid_search": selected_at - started,
            "trials": finished - selected_at,
            "total": finished - started,
        },
    )


def _point_of(hyper: Hyperparams) -> dict[str, float]:
    return {
        "learning_rate": hyper.learning_rate,
        "margin": hyper.margin,
        "regularization": hyper.regularization,
    }


async def elasticity_sweep(
    config: ExperimentConfig,
    ratios: Sequence[float] = SWEEP_RATIOS,
    etas: Sequence[float] = SWEEP_ETAS,
) -> SweepReport:
    """
    Test error as a function of the elasticity ratio ``w = m / n``.

    For each ``w`` the learning rate with the lowest training error is
    picked from ``etas`` (ties go to the smaller rate), then ``config.trials``
    repeats are evaluated on the test split. Rows come out sorted by ``w``.
    """
    started = time.monotonic()
    train_set, test_set = _load_split(config)
    n = train_set.max_length
    kind = config.classifier
    master = config.master_seed
    ordered = sorted({float(w) for w in ratios})
    etas_sorted = sorted({float(e) for e in etas})
    n_etas = len(etas_sorted)

    def selection_unit(w_idx: int, e_idx: int) -> Callable[[], float]:
        def run() -> float:
            m = resolve_elasticity(n, ordered[w_idx])
            point = {"learning_rate": etas_sorted[e_idx]}
            shuffle_seed = derive_seed(master, Stage.SWEEP, w_idx, 0, e_idx, 1)
            hyper = _hyperparams(point, config, shuffle_seed)
            init_seed = derive_seed(master, Stage.SWEEP, w_idx, 0, e_idx, 0)
            try:
                return _fit_and_score(train_set, train_set, kind, hyper, m, init_seed)
            except ElasticDivergenceError:
                return math.inf

        return run

    train_errors = await _fan_out(
        config.jobs, [selection_unit(w, e) for w in range(len(ordered)) for e in range(n_etas)]
    )
    chosen: list[float] = []
    for w_idx, w in enumerate(ordered):
        row = train_errors[w_idx * n_etas : (w_idx + 1) * n_etas]
        best = min(range(len(row)), key=lambda i: (row[i], i))
        if math.isinf(row[best]):
            raise ElasticDivergenceError(f"{train_set.name}: every learning rate diverged at w={w}")
        chosen.append(etas_sorted[best])
        logger.debug("Sweep w=%g: eta=%g (train error %.4f)", w, etas_sorted[best], row[best])

    def repeat_unit(w_idx: int, r: int) -> Callable[[], float]:
        def run() -> float:
            m = resolve_elasticity(n, ordered[w_idx])
            point = {"learning_rate": chosen[w_idx]}
            hyper = _hyperparams(point, config, derive_seed(master, Stage.SWEEP, w_idx, 1, r, 1))
            init_seed = derive_seed(master, Stage.SWEEP, w_idx, 1, r, 0)
            try:
                return _fit_and_score(train_set, test_set, kind, hyper, m, init_seed)
            except ElasticDivergenceError as exc:
                raise ElasticDivergenceError(
                    f"{train_set.name} w={ordered[w_idx]} repeat {r}: {exc}",
                    norm=exc.norm,
                    radius=exc.radius,
                ) from exc

        return run

    test_errors = await _fan_out(
        config.jobs, [repeat_unit(w, r) for w in range(len(ordered)) for r in range(config.trials)]
    )
    rows = []
    for w_idx, w in enumerate(ordered):
        mean, std = summarize(test_errors[w_idx * config.trials : (w_idx + 1) * config.trials])
        m = resolve_elasticity(n, w)
        rows.append(SweepRow(w=w, m=m, eta=chosen[w_idx], mean_error=mean, std_error=std))
    return SweepReport(
        dataset=train_set.name,
        rows=rows,
        seed=config.master_seed,
        config={**config.to_dict(), "sweep_ratios": ordered, "sweep_etas": etas_sorted},
        timings={"total": time.monotonic() - started},
    )


async def nn_experiment(config: ExperimentConfig) -> ErrorReport:
    """
    Test error of a nearest-neighbour baseline (``config.nn_mode``).

    NN+ALL compares against every training series by DTW (``config.band``
    applies); NN+KME and NN+AHC build one prototype per class and compare by
    elastic Euclidean distance. Deterministic, so a single error rate is
    reported.
    """
    started = time.monotonic()
    train_set, test_set = _load_split(config)
    mode = config.nn_mode
    refs: Dataset | PrototypeSet
    if mode is NNMode.ALL:
        refs = train_set
    else:
        mean_config = MeanConfig(elasticity=config.elasticity)
        build = kme_prototypes if mode is NNMode.KME else ahc_prototypes
        loop = asyncio.get_running_loop()
        refs = await loop.run_in_executor(None, build, train_set, mean_config)
    built = time.monotonic()

    n_chunks = min(config.jobs, len(test_set))
    chunks = [list(range(i, len(test_set), config.jobs)) for i in range(n_chunks)]

    def classify(indices: list[int]) -> list[tuple[int, int]]:
        return [(i, nn_classify(test_set.series[i], mode, refs, config.band)) for i in indices]

    predicted = np.empty(len(test_set), dtype=np.int64)
    for part in await _fan_out(config.jobs, [partial(classify, idx) for idx in chunks]):
        for i, label in part:
            predicted[i] = label
    rate = float(np.mean(predicted != test_set.labels))
    finished = time.monotonic()
    return ErrorReport.from_rates(
        train_set.name,
        f"NN+{mode.value.upper()}",
        [rate],
        params={
            "mode": mode.value,
            "band": config.band,
            "elasticity": config.elasticity or train_set.max_length,
        },
        seed=config.master_seed,
        config=config.to_dict(),
        timings={
            "prototypes": built - started,
            "classify": finished - built,
            "total": finished - started,
        },
    )


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def report_payload(
    report: ErrorReport | SweepReport, include_timings: bool = True
) -> dict[str, Any]:
    """JSON-ready dict of a report; ``timings`` is a separate top-level section."""
    from elasticts import __version__  # noqa: PLC0415

    payload: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "version": __version__,
        "dataset": report.dataset,
        "seed": report.seed,
        "config": report.config,
    }
    if isinstance(report, ErrorReport):
        payload.update(
            classifier=report.classifier,
            trials=report.error_rates,
            mean=report.mean,
            std=report.std,
            params=report.params,
        )
    else:
        payload["rows"] = [
            {"w": r.w, "m": r.m, "eta": r.eta, "meanError": r.mean_error, "stdError": r.std_error}
            for r in report.rows
        ]
    if include_timings:
        payload["timings"] = report.timings
    return payload


def _csv_text(report: ErrorReport | SweepReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if isinstance(report, ErrorReport):
        writer.writerow(
            ["dataset", "classifier", "row", "trial", "error_rate", "std", "format_version"]
        )
        head = [report.dataset, report.classifier]
        for t, rate in enumerate(report.error_rates):
            writer.writerow([*head, "trial", t, repr(rate), "", FORMAT_VERSION])
        writer.writerow(
            [*head, "summary", "", repr(report.mean), repr(report.std), FORMAT_VERSION]
        )
    else:
        writer.writerow(["w", "m", "eta", "meanError", "stdError", "format_version"])
        for r in report.rows:
            writer.writerow(
                [repr(r.w), r.m, repr(r.eta), repr(r.mean_error), repr(r.std_error), FORMAT_VERSION]
            )
    return buf.getvalue()


def render_report(report: ErrorReport | SweepReport, fmt: str = "json") -> str:
    """Serialize a report as ``json`` (sorted keys) or ``csv``."""
    if fmt == "json":
        return json.dumps(report_payload(report), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        return _csv_text(report)
    raise ElasticConfigError(f"unknown report format {fmt!r}")


def emit_report(
    report: ErrorReport | SweepReport, fmt: str = "json", path: str | Path | None = None
) -> str:
    """
    Render ``report`` and write it to ``path`` when given.

    Returns:
        The rendered text.

    Raises:
        ElasticDataError: ``path`` is not writable.
    """
    text = render_report(report, fmt)
    if path is not None:
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise ElasticDataError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
    return text
