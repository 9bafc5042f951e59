"""
elasticts.maps — Elastic embeddings and the proximities built on them.

The parameter space is the matrix space of shape ``n x m``: ``n`` is the
length of the longest admissible series, ``m`` the elasticity. A series ``x``
of length ``k <= n`` is embedded into a base matrix ``Z`` along a warping path
of the ``k x m`` grid by overwriting the path cells with the samples of
``x``; rows ``k+1..n`` are never touched.

Two proximities follow from the embedding:

* the elastic inner product ``max_phi <x (x)_phi 0, W>``;
* the elastic Euclidean distance ``min_phi ||x (x)_phi Y - Y||``.

Both reduce to the same dynamic program (see :mod:`elasticts._kernels`).
Functions returning a path take the active path selected by the recurrence;
ties resolve diagonal first, then vertical, then horizontal.
"""

from __future__ import annotations

import math
from typing import Any

import numpy as np
from numpy.typing import NDArray

from . import _kernels
from .exceptions import ElasticLengthError
from .models import (
    ElasticParams,
    EmbeddedMatrix,
    GridDims,
    Matrix,
    ScoreMatrix,
    Series,
    WarpingPath,
    as_matrix,
    as_series,
)
from .warping import require_path

Cells = tuple[NDArray[np.intp], NDArray[np.intp]]


def fit_series(x: Any, W: Matrix) -> Series:
    """
    Validate ``x`` against the row count of ``W``.

    Raises:
        ElasticLengthError: ``len(x)`` exceeds ``W.shape[0]``.
    """
    xs = as_series(x)
    if len(xs) > W.shape[0]:
        raise ElasticLengthError(
            f"series of length {len(xs)} does not fit a matrix with {W.shape[0]} rows"
        )
    return xs


def _path_from_cells(rows: NDArray[np.intp], cols: NDArray[np.intp]) -> WarpingPath:
    return WarpingPath.from_points(zip((rows + 1).tolist(), (cols + 1).tolist(), strict=True))


def identical_row_matrix(z: Any, n: int) -> Matrix:
    """``n x len(z)`` matrix whose rows all equal ``z``."""
    zs = as_series(z)
    if n < 1:
        raise ElasticLengthError(f"row count must be >= 1, got {n}")
    return np.ascontiguousarray(np.tile(zs, (n, 1)))


# ---------------------------------------------------------------------------
# Embedding
# ---------------------------------------------------------------------------


def embed(x: Any, Z: Any, path: WarpingPath) -> EmbeddedMatrix:
    """
    Elastic embedding of ``x`` into ``Z`` along ``path``.

    Raises:
        ElasticLengthError: ``x`` is longer than ``Z`` has rows.
        ElasticPathError: ``path`` is not a warping path of ``len(x) x m``.
    """
    base = as_matrix(Z)
    xs = fit_series(x, base)
    require_path(path, GridDims(len(xs), base.shape[1]))
    rows, cols = path.row_index, path.col_index
    entries = base.copy()
    entries[rows, cols] = xs[rows]
    return EmbeddedMatrix(entries=entries, source_path=path, source_length=len(xs))


def path_inner_product(x: Any, W: Any, path: WarpingPath) -> float:
    """``<x (x)_path 0, W>``: sum of ``x_i * w_ij`` over the path cells."""
    Wm = as_matrix(W)
    xs = fit_series(x, Wm)
    require_path(path, GridDims(len(xs), Wm.shape[1]))
    rows, cols = path.row_index, path.col_index
    return float(np.dot(xs[rows], Wm[rows, cols]))


def path_distance_cost(x: Any, Y: Any, path: WarpingPath) -> float:
    """``||x (x)_path Y - Y||^2``: squared deviations on the path cells only."""
    Ym = as_matrix(Y)
    xs = fit_series(x, Ym)
    require_path(path, GridDims(len(xs), Ym.shape[1]))
    rows, cols = path.row_index, path.col_index
    diff = xs[rows] - Ym[rows, cols]
    return float(np.dot(diff, diff))


# ---------------------------------------------------------------------------
# Elastic inner product
# ---------------------------------------------------------------------------


def _product_terms(xs: Series, W: Matrix) -> Matrix:
    return np.ascontiguousarray(xs[:, None] * W[: len(xs)])


def inner_product_scores(x: Any, W: Any) -> ScoreMatrix:
    """Full ``k x m`` score matrix of the elastic inner product."""
    Wm = as_matrix(W)
    xs = fit_series(x, Wm)
    return ScoreMatrix(_kernels.accumulate(_product_terms(xs, Wm), -1, True), maximize=True)


def elastic_inner_product(x: Any, W: Any) -> float:
    """
    Elastic inner product ``max_phi <x (x)_phi 0, W>``.

    Raises:
        ElasticLengthError: ``x`` is longer than ``W`` has rows.
    """
    Wm = as_matrix(W)
    xs = fit_series(x, Wm)
    return float(_kernels.accumulate_value(_product_terms(xs, Wm), -1, True))


def inner_product_cells(xs: Series, W: Matrix) -> tuple[float, NDArray[np.intp], NDArray[np.intp]]:
    """
    Value and 0-based active cells of the elastic inner product.

    Expects already validated input; this is the hot path of training.
    """
    scores = _kernels.accumulate(_product_terms(xs, W), -1, True)
    rows, cols = _kernels.traceback(scores, True)
    return float(scores[-1, -1]), rows, cols


def elastic_inner_product_with_path(x: Any, W: Any) -> tuple[float, WarpingPath]:
    """Elastic inner product together with the active path attaining it."""
    Wm = as_matrix(W)
    xs = fit_series(x, Wm)
    value, rows, cols = inner_product_cells(xs, Wm)
    return value, _path_from_cells(rows, cols)


# ---------------------------------------------------------------------------
# Elastic Euclidean distance
# ---------------------------------------------------------------------------


def _distance_terms(xs: Series, Y: Matrix) -> Matrix:
    return np.ascontiguousarray((xs[:, None] - Y[: len(xs)]) ** 2)


def euclidean_scores(x: Any, Y: Any) -> ScoreMatrix:
    """Full ``k x m`` score matrix of the squared elastic Euclidean distance."""
    Ym = as_matrix(Y)
    xs = fit_series(x, Ym)
    return ScoreMatrix(_kernels.accumulate(_distance_terms(xs, Ym), -1, False), maximize=False)


def elastic_euclidean_cost(x: Any, Y: Any) -> float:
    """Squared elastic Euclidean distance ``min_phi ||x (x)_phi Y - Y||^2``."""
    Ym = as_matrix(Y)
    xs = fit_series(x, Ym)
    return float(_kernels.accumulate_value(_distance_terms(xs, Ym), -1, False))


def euclidean_cells(xs: Series, Y: Matrix) -> tuple[float, NDArray[np.intp], NDArray[np.intp]]:
    """Squared distance and 0-based active cells; expects validated input."""
    scores = _kernels.accumulate(_distance_terms(xs, Y), -1, False)
    rows, cols = _kernels.traceback(scores, False)
    return float(scores[-1, -1]), rows, cols


def elastic_euclidean(x: Any, Y: Any) -> tuple[float, WarpingPath]:
    """
    Elastic Euclidean distance of ``x`` to ``Y`` and the active path.

    With every row of ``Y`` equal to ``z`` this is the DTW distance between
    ``x`` and ``z``.

    Raises:
        ElasticLengthError: ``x`` is longer than ``Y`` has rows.
    """
    Ym = as_matrix(Y)
    xs = fit_series(x, Ym)
    cost, rows, cols = euclidean_cells(xs, Ym)
    return math.sqrt(cost), _path_from_cells(rows, cols)


# ---------------------------------------------------------------------------
# Elastic linear functions
# ---------------------------------------------------------------------------


def elastic_linear(x: Any, theta: ElasticParams) -> float:
    """``b + elastic_inner_product(x, W)``."""
    return theta.b + elastic_inner_product(x, theta.W)
