"""
elasticts.centroid — Means in the elastic matrix space, clustering and NN baselines.

The variation of a matrix ``Y`` on a set of series is
``F(Y) = sum_i min_phi ||x_i (x)_phi Y - Y||^2``; a matrix minimising it is a
mean. :func:`compute_mean` minimises ``F`` with the generalized gradient
iteration::

    Y <- Y + eta * sum_i (X_i - Y),    X_i = x_i (x)_{phi_i} Y

where ``phi_i`` is the active path of ``x_i`` against ``Y``. With the default
``eta = 1/N`` the step is the plain average of the embeddings. Cells that no
active path covers keep their value.

Prototype baselines build on the mean: NN+KME uses one k-means centroid per
class, NN+AHC merges per-cluster means along a Ward dendrogram over pairwise DTW
distances.
"""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING, Any

import numpy as np
from scipy.cluster.hierarchy import linkage
from scipy.spatial.distance import squareform

from .const import KMEANS_MAX_ITER
from .exceptions import ElasticDataError
from .maps import elastic_euclidean_cost, euclidean_cells, fit_series, identical_row_matrix
from .models import (
    ClusterAssignment,
    Dataset,
    Matrix,
    MeanConfig,
    MeanState,
    NNMode,
    PrototypeSet,
    Series,
    as_matrix,
    as_series,
)
from .warping import dtw_distance, pairwise_dtw

if TYPE_CHECKING:
    from collections.abc import Sequence

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Variation and the mean iteration
# ---------------------------------------------------------------------------


def variation(Y: Any, series: Sequence[Any]) -> float:
    """Sum of squared elastic Euclidean distances from ``series`` to ``Y`` (0 for no series)."""
    Ym = as_matrix(Y)
    return float(sum(elastic_euclidean_cost(x, Ym) for x in series))


def mean_step(Y: Any, series: Sequence[Any], eta: float | None = None) -> Matrix:
    """
    One mean update ``Y + eta * sum_i (X_i - Y)``.

    ``eta=None`` (or ``eta == 1/N``) computes ``(1/N) * sum_i X_i`` directly.

    Raises:
        ElasticDataError: ``series`` is empty.
        ElasticLengthError: a series does not fit ``Y``.
    """
    Ym = as_matrix(Y)
    xs_all = [fit_series(x, Ym) for x in series]
    if not xs_all:
        raise ElasticDataError("mean step needs at least one series")
    N = len(xs_all)
    total = np.zeros_like(Ym)
    for xs in xs_all:
        _, rows, cols = euclidean_cells(xs, Ym)
        embedded = Ym.copy()
        embedded[rows, cols] = xs[rows]
        total += embedded
    if eta is None or math.isclose(eta * N, 1.0, rel_tol=1e-12, abs_tol=0.0):
        return total / N
    if eta <= 0.0:
        raise ElasticDataError(f"mean step size must be > 0, got {eta}")
    return (1.0 - eta * N) * Ym + eta * total


def resample(z: Series, length: int) -> Series:
    """Linear resampling of ``z`` onto ``length`` evenly spaced points."""
    if len(z) == length:
        return z.copy()
    if len(z) == 1:
        return np.full(length, z[0])
    grid = np.linspace(0.0, len(z) - 1.0, length)
    return np.interp(grid, np.arange(len(z), dtype=np.float64), z)


def medoid(series: Sequence[Any], band: int | None = None) -> int:
    """
    Index of the series with the smallest sum of squared DTW distances to the others.

    That is the member whose identical-row matrix has the lowest variation.
    Ties go to the first index.
    """
    xs_all = [as_series(x) for x in series]
    if not xs_all:
        raise ElasticDataError("medoid of an empty set")
    dist = pairwise_dtw(xs_all, band)
    return int(np.argmin(np.sum(dist**2, axis=1)))


def initial_mean_matrix(series: Sequence[Series], m: int, n: int) -> Matrix:
    """Identical-row ``n x m`` matrix built from the medoid resampled to ``m`` samples."""
    z = resample(series[medoid(series)], m)
    return identical_row_matrix(z, n)


def compute_mean(
    series: Sequence[Any],
    config: MeanConfig | None = None,
    init: Any | None = None,
    n: int | None = None,
) -> MeanState:
    """
    Mean of ``series`` in the ``n x m`` matrix space.

    Iterates :func:`mean_step` until the variation changes by at most
    ``tol * max(1, F)`` or ``max_iter`` steps ran.

    Args:
        series: The series to average.
        config: Step size, stopping rule and elasticity (``m`` defaults to ``n``).
        init:   Starting matrix; defaults to the medoid identical-row matrix.
        n:      Row count; defaults to the longest series.

    Raises:
        ElasticDataError: ``series`` is empty.
    """
    cfg = config or MeanConfig()
    xs_all = [as_series(x) for x in series]
    if not xs_all:
        raise ElasticDataError("cannot compute the mean of an empty set")
    rows = n if n is not None else max(len(x) for x in xs_all)
    if init is None:
        Y = initial_mean_matrix(xs_all, cfg.elasticity or rows, rows)
    else:
        Y = as_matrix(init).copy()

    F = variation(Y, xs_all)
    state = MeanState(Y=Y, variation=F, iterations=0, variation_trace=[F])
    for iteration in range(1, cfg.max_iter + 1):
        Y = mean_step(Y, xs_all, cfg.eta)
        F_next = variation(Y, xs_all)
        logger.debug("mean iteration %d: variation %.9g", iteration, F_next)
        state.Y, state.variation, state.iterations = Y, F_next, iteration
        state.variation_trace.append(F_next)
        converged = abs(F - F_next) <= cfg.tol * max(1.0, F)
        F = F_next
        if converged:
            break
    return state


# ---------------------------------------------------------------------------
# k-means
# ---------------------------------------------------------------------------


def _farthest_first(dist: np.ndarray, k: int, start: int) -> list[int]:
    chosen = [start]
    nearest = dist[start].copy()
    while len(chosen) < k:
        nxt = int(np.argmax(nearest))
        chosen.append(nxt)
        nearest = np.minimum(nearest, dist[nxt])
    return chosen


def _assign(series: list[Series], centroids: list[Matrix]) -> tuple[np.ndarray, np.ndarray]:
    assignments = np.empty(len(series), dtype=np.int64)
    costs = np.empty(len(series))
    for idx, xs in enumerate(series):
        best, best_cost = 0, math.inf
        for c, Y in enumerate(centroids):
            cost = elastic_euclidean_cost(xs, Y)
            if cost < best_cost:
                best, best_cost = c, cost
        assignments[idx], costs[idx] = best, best_cost
    return assignments, costs


def _reseed_empty(
    series: list[Series], centroids: list[Matrix], assignments: np.ndarray, costs: np.ndarray
) -> None:
    """Give every empty cluster the series farthest from its centroid, embedded at zero cost."""
    k = len(centroids)
    for cluster in range(k):
        if np.any(assignments == cluster):
            continue
        sizes = np.bincount(assignments, minlength=k)
        movable = np.flatnonzero(sizes[assignments] > 1)
        donor = int(movable[np.argmax(costs[movable])])
        old = centroids[int(assignments[donor])]
        _, rows, cols = euclidean_cells(series[donor], old)
        seeded = old.copy()
        seeded[rows, cols] = series[donor][rows]
        logger.warning("k-means cluster %d became empty; reseeded with series %d", cluster, donor)
        centroids[cluster] = seeded
        assignments[donor] = cluster
        costs[donor] = 0.0


def kmeans(
    series: Sequence[Any],
    k: int,
    config: MeanConfig | None = None,
    max_iter: int = KMEANS_MAX_ITER,
    n: int | None = None,
) -> tuple[list[Matrix], ClusterAssignment]:
    """
    Lloyd-style k-means with elastic Euclidean assignment and mean centroids.

    Initial centroids are identical-row matrices of ``k`` series picked
    farthest-first (by DTW) starting from the medoid. Each centroid update
    warm-starts :func:`compute_mean` from the previous centroid, so the
    total within-cluster variation never increases.

    Raises:
        ElasticDataError: ``k`` is not in ``1..len(series)``.
    """
    cfg = config or MeanConfig()
    xs_all = [as_series(x) for x in series]
    if not 1 <= k <= len(xs_all):
        raise ElasticDataError(f"k must be between 1 and {len(xs_all)}, got {k}")
    rows = n if n is not None else max(len(x) for x in xs_all)
    m = cfg.elasticity or rows

    dist = pairwise_dtw(xs_all)
    start = int(np.argmin(np.sum(dist**2, axis=1)))
    centroids = [
        identical_row_matrix(resample(xs_all[i], m), rows)
        for i in _farthest_first(dist, k, start)
    ]

    previous: np.ndarray | None = None
    trace: list[float] = []
    assignments = np.zeros(len(xs_all), dtype=np.int64)
    for iteration in range(1, max_iter + 1):
        assignments, costs = _assign(xs_all, centroids)
        _reseed_empty(xs_all, centroids, assignments, costs)
        if previous is not None and np.array_equal(assignments, previous):
            break
        objective = 0.0
        for cluster in range(k):
            members = [xs_all[i] for i in np.flatnonzero(assignments == cluster)]
            state = compute_mean(members, cfg, init=centroids[cluster], n=rows)
            centroids[cluster] = state.Y
            objective += state.variation
        trace.append(objective)
        logger.debug("k-means iteration %d: objective %.9g", iteration, objective)
        previous = assignments.copy()

    members_by_cluster = [np.flatnonzero(assignments == c).tolist() for c in range(k)]
    clusters = ClusterAssignment(
        assignments=assignments, members=members_by_cluster, objective_trace=trace
    )
    return centroids, clusters


# ---------------------------------------------------------------------------
# Prototypes
# ---------------------------------------------------------------------------


def ward_merge_order(series: Sequence[Any], band: int | None = None) -> np.ndarray:
    """
    Ward linkage matrix over pairwise DTW distances.

    Rows follow :func:`scipy.cluster.hierarchy.linkage`: ``(a, b, height, size)``
    with ids ``>= len(series)`` naming earlier merges. One series gives an
    empty ``0 x 4`` matrix.
    """
    xs_all = [as_series(x) for x in series]
    if len(xs_all) < 2:
        return np.empty((0, 4))
    return np.asarray(linkage(squareform(pairwise_dtw(xs_all, band), checks=False), method="ward"))


def _merge_clusters(
    a: tuple[Matrix, list[Series]], b: tuple[Matrix, list[Series]], cfg: MeanConfig, rows: int
) -> tuple[Matrix, list[Series]]:
    """Mean of the union, started from the size-weighted average of the two prototypes."""
    (Y_a, members_a), (Y_b, members_b) = a, b
    members = members_a + members_b
    if len(members) == 2:
        # Two singletons: the pair mean from the usual medoid start.
        return compute_mean(members, cfg, n=rows).Y, members
    start = (len(members_a) * Y_a + len(members_b) * Y_b) / len(members)
    return compute_mean(members, cfg, init=start, n=rows).Y, members


def _ahc_prototype(series: list[Series], cfg: MeanConfig, rows: int) -> Matrix:
    clusters = {i: (compute_mean([x], cfg, n=rows).Y, [x]) for i, x in enumerate(series)}
    for step, (a, b, _, _) in enumerate(ward_merge_order(series)):
        merged = _merge_clusters(clusters.pop(int(a)), clusters.pop(int(b)), cfg, rows)
        clusters[len(series) + step] = merged
    [(prototype, _)] = clusters.values()
    return prototype


def ahc_prototypes(dataset: Dataset, config: MeanConfig | None = None) -> PrototypeSet:
    """
    One prototype per class from Ward agglomerative clustering.

    Every series starts as its own cluster with its singleton mean as
    prototype. Walking the merge order, two clusters are replaced by the
    :func:`compute_mean` of their members, started from the average of their
    prototypes weighted by cluster size. A class of two series therefore gets
    the mean of the pair.
    """
    cfg = config or MeanConfig()
    labels = list(dataset.classes)
    rows = dataset.max_length
    prototypes = []
    for label in labels:
        members = dataset.of_class(label)
        logger.debug("AHC prototype for class %+d from %d series", label, len(members))
        prototypes.append(_ahc_prototype(members, cfg, rows))
    return PrototypeSet(mode=NNMode.AHC, labels=labels, prototypes=prototypes)


def kme_prototypes(dataset: Dataset, config: MeanConfig | None = None) -> PrototypeSet:
    """One prototype per class: the single k-means centroid (``k = 1``) of each class."""
    cfg = config or MeanConfig()
    labels = list(dataset.classes)
    rows = dataset.max_length
    prototypes = [kmeans(dataset.of_class(label), 1, cfg, n=rows)[0][0] for label in labels]
    return PrototypeSet(mode=NNMode.KME, labels=labels, prototypes=prototypes)


# ---------------------------------------------------------------------------
# Nearest neighbour
# ---------------------------------------------------------------------------


def nn_classify(
    x: Any, mode: NNMode, refs: Dataset | PrototypeSet, band: int | None = None
) -> int:
    """
    Label of the nearest reference; the first reference wins ties.

    ``NNMode.ALL`` compares ``x`` with every training series of a
    :class:`Dataset` by DTW (optionally banded). The prototype modes compare
    with each matrix of a :class:`PrototypeSet` by elastic Euclidean distance.

    Raises:
        ElasticDataError: ``refs`` is empty or does not match ``mode``.
    """
    xs = as_series(x)
    best_label, best = 0, math.inf
    if NNMode(mode) is NNMode.ALL:
        if not isinstance(refs, Dataset):
            raise ElasticDataError("NN+ALL needs the training dataset as references")
        for ref, label in refs:
            d = dtw_distance(xs, ref, band)
            if d < best:
                best_label, best = label, d
        return best_label
    if not isinstance(refs, PrototypeSet) or len(refs) == 0:
        raise ElasticDataError("prototype NN needs a non-empty prototype set")
    for label, Y in zip(refs.labels, refs.prototypes, strict=True):
        cost = elastic_euclidean_cost(xs, Y)
        if cost < best:
            best_label, best = label, cost
    return best_label
