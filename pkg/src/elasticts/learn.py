"""
elasticts.learn — Elastic linear classifiers and their stochastic trainer.

An elastic linear classifier scores a series with
``f(x) = b + elastic_inner_product(x, W)`` and predicts ``+1`` iff
``f(x) >= 0``. Four losses are available (see :class:`~elasticts.models.LossKind`).

Gradients are taken at the active warping path ``phi`` of ``f``: with
``X = x (x)_phi 0`` every loss has the form ``dl/dW = c * X`` and ``dl/db = c``
where ``c = dl/df`` is the loss slope. The linear SVM adds ``2 * lambda * W``.
Labels are always ``{+1, -1}``; the logistic loss maps them to ``{1, 0}``
internally.

Usage::

    theta0 = ElasticParams.initialize(dataset.max_length, m, rng)
    hyper = Hyperparams(0.01, regularization=2**-5)
    theta, report = train(theta0, dataset, LossKind.LINEAR_SVM, hyper)
    label = predict(theta, x)
"""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING, Any

import numpy as np
from numpy.typing import NDArray
from scipy.special import expit

from .exceptions import (
    ElasticDataError,
    ElasticDivergenceError,
    ElasticLengthError,
    ElasticNonSmoothError,
    ElasticNumericalError,
)
from .maps import elastic_inner_product, elastic_linear, fit_series, inner_product_cells
from .models import Dataset, ElasticParams, Hyperparams, LossKind, Matrix, Series, TrainReport

if TYPE_CHECKING:
    from collections.abc import Iterator

logger = logging.getLogger(__name__)

Example = tuple[Any, int]


def _require_label(y: int) -> int:
    if y not in (1, -1):
        raise ElasticDataError(f"label must be +1 or -1, got {y!r}")
    return int(y)


# ---------------------------------------------------------------------------
# Prediction
# ---------------------------------------------------------------------------


def predict(theta: ElasticParams, x: Any) -> int:
    """``+1`` iff ``f(x) >= 0``, else ``-1``."""
    return 1 if elastic_linear(x, theta) >= 0.0 else -1


def predict_proba(theta: ElasticParams, x: Any) -> float:
    """Logistic probability of the positive class, ``sigmoid(f(x))``."""
    return float(expit(elastic_linear(x, theta)))


def predict_labels(theta: ElasticParams, series: list[Series]) -> NDArray[np.int64]:
    return np.fromiter((predict(theta, x) for x in series), dtype=np.int64, count=len(series))


def error_rate(theta: ElasticParams, dataset: Dataset) -> float:
    """Fraction of misclassified examples."""
    predicted = predict_labels(theta, dataset.series)
    return float(np.mean(predicted != dataset.labels))


# ---------------------------------------------------------------------------
# Losses and subgradients
# ---------------------------------------------------------------------------


def loss(kind: LossKind, y: int, f: float, hyper: Hyperparams, w_sq_norm: float = 0.0) -> float:
    """
    Loss of score ``f`` for label ``y``.

    ``w_sq_norm`` is ``||W||^2``; only the linear SVM reads it.

    Raises:
        ElasticDataError: ``y`` is not ``+1`` or ``-1``.
    """
    y = _require_label(y)
    if kind is LossKind.PERCEPTRON:
        return max(0.0, -y * f)
    if kind is LossKind.MARGIN_PERCEPTRON:
        return max(0.0, hyper.margin - y * f)
    if kind is LossKind.LOGISTIC:
        # -y01 log(g) - (1 - y01) log(1 - g) with g = sigmoid(f)
        y01 = (y + 1) // 2
        return float(np.logaddexp(0.0, f) - y01 * f)
    return hyper.regularization * w_sq_norm + max(0.0, 1.0 - y * f)


def loss_slope(kind: LossKind, y: int, f: float, hyper: Hyperparams) -> float:
    """Derivative of the data term of the loss with respect to ``f``."""
    if kind is LossKind.LOGISTIC:
        return -(((y + 1) // 2) - float(expit(f)))
    if kind is LossKind.PERCEPTRON:
        # f = 0 predicts +1, so a negative example scored exactly 0 is misclassified.
        return float(-y) if (f >= 0.0) != (y > 0) else 0.0
    if kind is LossKind.MARGIN_PERCEPTRON:
        threshold = hyper.margin
    else:
        threshold = 1.0
    return float(-y) if threshold - y * f > 0.0 else 0.0


def _hinge_argument(kind: LossKind, y: int, f: float, hyper: Hyperparams) -> float | None:
    if kind is LossKind.LOGISTIC:
        return None
    threshold = {LossKind.PERCEPTRON: 0.0, LossKind.MARGIN_PERCEPTRON: hyper.margin}.get(kind, 1.0)
    return threshold - y * f


def example_loss(kind: LossKind, theta: ElasticParams, x: Any, y: int, hyper: Hyperparams) -> float:
    """Loss of ``theta`` on one example, regularizer included."""
    w_sq = float(np.vdot(theta.W, theta.W)) if kind is LossKind.LINEAR_SVM else 0.0
    return loss(kind, y, elastic_linear(x, theta), hyper, w_sq)


def mean_loss(kind: LossKind, theta: ElasticParams, dataset: Dataset, hyper: Hyperparams) -> float:
    return float(np.mean([example_loss(kind, theta, x, y, hyper) for x, y in dataset]))


def subgradient(
    kind: LossKind, example: Example, theta: ElasticParams, hyper: Hyperparams
) -> tuple[Matrix, float]:
    """
    Generalized gradient ``(dW, db)`` of the loss at ``theta``.

    ``dW`` is ``c * (x (x)_phi 0)`` along the active path ``phi``; the linear
    SVM adds ``2 * lambda * W``.

    Raises:
        ElasticLengthError: the series does not fit ``theta``.
        ElasticDataError: invalid label.
    """
    x, y = example
    y = _require_label(y)
    xs = fit_series(x, theta.W)
    inner, rows, cols = inner_product_cells(xs, theta.W)
    coef = loss_slope(kind, y, theta.b + inner, hyper)
    dW = np.zeros_like(theta.W)
    if coef != 0.0:
        dW[rows, cols] = coef * xs[rows]
    if kind is LossKind.LINEAR_SVM and hyper.regularization > 0.0:
        dW += 2.0 * hyper.regularization * theta.W
    return dW, coef


def _apply_step(
    W: Matrix,
    b: float,
    xs: Series,
    rows: NDArray[np.intp],
    cols: NDArray[np.intp],
    coef: float,
    eta: float,
    kind: LossKind,
    hyper: Hyperparams,
) -> float:
    """In-place ``W -= eta * dW``; returns the new bias."""
    if kind is LossKind.LINEAR_SVM and hyper.regularization > 0.0:
        W *= 1.0 - 2.0 * eta * hyper.regularization
    if coef != 0.0:
        W[rows, cols] -= (eta * coef) * xs[rows]
        b -= eta * coef
    return b


def sgd_step(
    theta: ElasticParams, example: Example, eta_t: float, kind: LossKind, hyper: Hyperparams
) -> ElasticParams:
    """
    One generalized gradient step ``theta - eta_t * subgradient``.

    For the perceptron this is ``W + eta * y * X`` and ``b + eta * y`` on a
    misclassified example and no change otherwise.
    """
    if not eta_t > 0.0:
        raise ElasticNumericalError(f"step size must be > 0, got {eta_t}")
    x, y = example
    y = _require_label(y)
    xs = fit_series(x, theta.W)
    inner, rows, cols = inner_product_cells(xs, theta.W)
    coef = loss_slope(kind, y, theta.b + inner, hyper)
    W = theta.W.copy()
    b = _apply_step(W, theta.b, xs, rows, cols, coef, eta_t, kind, hyper)
    return ElasticParams(W, b)


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------


def epoch_permutations(seed: int, n_examples: int) -> Iterator[NDArray[np.intp]]:
    """Endless stream of example orders, one permutation per epoch."""
    rng = np.random.default_rng(seed)
    while True:
        yield rng.permutation(n_examples)


def _check_divergence(W: Matrix, b: float, radius: float) -> None:
    norm = float(np.linalg.norm(W))
    if not (math.isfinite(norm) and math.isfinite(b)):
        raise ElasticDivergenceError(
            "training produced non-finite parameters", norm=norm, radius=radius
        )
    if norm > radius:
        raise ElasticDivergenceError(
            f"weight norm {norm:.6g} exceeded the divergence radius {radius:.6g}",
            norm=norm,
            radius=radius,
        )


def train(
    theta0: ElasticParams, dataset: Dataset, kind: LossKind, hyper: Hyperparams
) -> tuple[ElasticParams, TrainReport]:
    """
    Stochastic generalized gradient descent over ``dataset``.

    Each epoch visits the examples in the order drawn by
    :func:`epoch_permutations` from ``hyper.shuffle_seed``. Training stops
    after ``hyper.max_epochs`` epochs or, for the perceptron losses, after
    the first epoch without an update. ``theta0`` is not modified.

    Raises:
        ElasticDataError: empty dataset or invalid labels.
        ElasticLengthError: a series is longer than ``theta0.n``.
        ElasticDivergenceError: ``||W||`` left ``hyper.divergence_radius`` or
            the parameters became non-finite.
    """
    if len(dataset) == 0:
        raise ElasticDataError("cannot train on an empty dataset")
    if dataset.max_length > theta0.n:
        raise ElasticLengthError(
            f"longest training series has length {dataset.max_length} "
            f"but the model has {theta0.n} rows"
        )
    W = theta0.W.copy()
    b = theta0.b
    series = dataset.series
    labels = [int(y) for y in dataset.labels]
    n_examples = len(series)
    report = TrainReport()
    orders = epoch_permutations(hyper.shuffle_seed, n_examples)
    step = 0

    for epoch in range(hyper.max_epochs):
        updates = 0
        for idx in next(orders):
            xs, y = series[idx], labels[idx]
            inner, rows, cols = inner_product_cells(xs, W)
            f = b + inner
            if not math.isfinite(f):
                raise ElasticDivergenceError(
                    f"non-finite score at epoch {epoch}",
                    norm=float(np.linalg.norm(W)),
                    radius=hyper.divergence_radius,
                )
            coef = loss_slope(kind, y, f, hyper)
            eta = hyper.rate_at(step, n_examples)
            b = _apply_step(W, b, xs, rows, cols, coef, eta, kind, hyper)
            step += 1
            if coef != 0.0:
                updates += 1
        _check_divergence(W, b, hyper.divergence_radius)

        theta = ElasticParams(W, b)
        epoch_loss = mean_loss(kind, theta, dataset, hyper)
        report.epochs_run = epoch + 1
        report.updates_applied += updates
        report.loss_trace.append(epoch_loss)
        logger.debug(
            "%s epoch %d: %d updates, mean loss %.6g", kind.value, epoch + 1, updates, epoch_loss
        )
        if updates == 0 and kind.is_perceptron_family:
            break

    result = ElasticParams(W, b)
    report.final_train_error_rate = error_rate(result, dataset)
    return result, report


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------


def subgradient_bound(dataset: Dataset, m: int, n: int | None = None) -> float:
    """
    ``C^2 = max_i (1 + max_phi sum_{(r, c) in phi} x_r^2)``.

    ``C`` bounds the norm of every ``(X, 1)`` the trainer can step along, so
    the margin perceptron converges on separable data for ``eta <= xi / C^2``.
    """
    rows = n if n is not None else dataset.max_length
    ones = np.ones((rows, m))
    return max(1.0 + elastic_inner_product(x * x, ones) for x in dataset.series)


def finite_diff_check(
    kind: LossKind,
    example: Example,
    theta: ElasticParams,
    hyper: Hyperparams,
    eps: float = 1e-6,
    *,
    relative: bool = False,
) -> float:
    """
    Largest deviation between :func:`subgradient` and central differences.

    Every entry of ``W`` and the bias are probed with ``+-eps``. With
    ``relative=True`` each deviation is divided by ``max(1, |analytic|)``.

    Raises:
        ElasticNonSmoothError: the active path or the active branch of the
            loss differs between ``theta`` and a probe point.
    """
    x, y = example
    y = _require_label(y)
    xs = fit_series(x, theta.W)
    dW, db = subgradient(kind, (xs, y), theta, hyper)
    _, rows0, cols0 = inner_product_cells(xs, theta.W)
    branch0 = _hinge_argument(kind, y, elastic_linear(xs, theta), hyper)
    if branch0 == 0.0:
        raise ElasticNonSmoothError("loss is evaluated exactly at its hinge")

    def probe(W: Matrix, b: float) -> float:
        inner, rows, cols = inner_product_cells(xs, W)
        if not (np.array_equal(rows, rows0) and np.array_equal(cols, cols0)):
            raise ElasticNonSmoothError("active warping path changes under perturbation")
        branch = _hinge_argument(kind, y, b + inner, hyper)
        if branch0 is not None and branch is not None and (branch > 0.0) != (branch0 > 0.0):
            raise ElasticNonSmoothError("active branch of the loss changes under perturbation")
        w_sq = float(np.vdot(W, W)) if kind is LossKind.LINEAR_SVM else 0.0
        return loss(kind, y, b + inner, hyper, w_sq)

    def deviation(analytic: float, numeric: float) -> float:
        dev = abs(analytic - numeric)
        return dev / max(1.0, abs(analytic)) if relative else dev

    worst = 0.0
    for i, j in np.ndindex(*theta.W.shape):
        W_plus = theta.W.copy()
        W_plus[i, j] += eps
        W_minus = theta.W.copy()
        W_minus[i, j] -= eps
        numeric = (probe(W_plus, theta.b) - probe(W_minus, theta.b)) / (2.0 * eps)
        worst = max(worst, deviation(float(dW[i, j]), numeric))
    numeric_b = (probe(theta.W, theta.b + eps) - probe(theta.W, theta.b - eps)) / (2.0 * eps)
    return max(worst, deviation(db, numeric_b))
