"""
elasticts.warping — Warping paths and dynamic time warping.

A warping path through a ``rows x cols`` grid starts at ``(1, 1)``, ends at
``(rows, cols)`` and advances by one of the steps ``(1, 0)``, ``(0, 1)`` or
``(1, 1)``. DTW between two series is the square root of the smallest sum of
squared sample differences along such a path.

Besides the dynamic program this module ships a brute-force enumerator of
all warping paths. It is exponential and guarded by
:data:`~elasticts.const.ORACLE_MAX_GRID_SPAN`; tests use it as the reference
every dynamic program is checked against.
"""

from __future__ import annotations

import logging
from typing import Any

import numpy as np

from . import _kernels
from .const import ORACLE_MAX_GRID_SPAN
from .exceptions import ElasticBandError, ElasticOracleLimitError, ElasticPathError
from .models import AlignmentResult, GridDims, Series, WarpingPath, as_series

logger = logging.getLogger(__name__)

_STEPS = frozenset({(1, 0), (0, 1), (1, 1)})

# ---------------------------------------------------------------------------
# Path combinatorics
# ---------------------------------------------------------------------------


def validate_path(path: WarpingPath, dims: GridDims) -> bool:
    """Return True iff ``path`` is a warping path of the grid ``dims``."""
    points = path.points
    if not points:
        return False
    if points[0] != (1, 1) or points[-1] != (dims.rows, dims.cols):
        return False
    for (i0, j0), (i1, j1) in zip(points, points[1:], strict=False):
        if (i1 - i0, j1 - j0) not in _STEPS:
            return False
    return True


def require_path(path: WarpingPath, dims: GridDims) -> None:
    """Raise :class:`ElasticPathError` unless ``path`` is valid for ``dims``."""
    if not validate_path(path, dims):
        raise ElasticPathError(
            f"path of {len(path)} points is not a warping path of {dims.rows}x{dims.cols}"
        )


def count_warping_paths(dims: GridDims) -> int:
    """
    Number of warping paths of ``dims``.

    Uses ``c(i, j) = c(i-1, j) + c(i, j-1) + c(i-1, j-1)`` with exact
    integers, so it also works far beyond the enumeration guard.
    """
    prev = [1] * dims.cols
    for _ in range(1, dims.rows):
        cur = [1] + [0] * (dims.cols - 1)
        for j in range(1, dims.cols):
            cur[j] = prev[j] + cur[j - 1] + prev[j - 1]
        prev = cur
    return prev[-1]


def enumerate_warping_paths(dims: GridDims) -> list[WarpingPath]:
    """
    All warping paths of ``dims``, depth first.

    Raises:
        ElasticOracleLimitError: ``rows + cols`` exceeds the enumeration guard.
    """
    if dims.rows + dims.cols > ORACLE_MAX_GRID_SPAN:
        raise ElasticOracleLimitError(
            f"refusing to enumerate paths of a {dims.rows}x{dims.cols} grid "
            f"(rows + cols > {ORACLE_MAX_GRID_SPAN})"
        )
    end = (dims.rows, dims.cols)
    paths: list[WarpingPath] = []
    stack: list[tuple[tuple[int, int], ...]] = [((1, 1),)]
    while stack:
        prefix = stack.pop()
        i, j = prefix[-1]
        if (i, j) == end:
            paths.append(WarpingPath(prefix))
            continue
        # Pushed in reverse so the diagonal branch is explored first.
        for di, dj in ((0, 1), (1, 0), (1, 1)):
            ni, nj = i + di, j + dj
            if ni <= dims.rows and nj <= dims.cols:
                stack.append((*prefix, (ni, nj)))
    return paths


# ---------------------------------------------------------------------------
# DTW
# ---------------------------------------------------------------------------


def path_cost(x: Any, y: Any, path: WarpingPath) -> float:
    """Sum of ``(x_i - y_j)^2`` over the points of ``path``."""
    xs, ys = as_series(x), as_series(y)
    require_path(path, GridDims(len(xs), len(ys)))
    diff = xs[path.row_index] - ys[path.col_index]
    return float(np.dot(diff, diff))


def squared_differences(x: Series, y: Series) -> np.ndarray:
    """Local cost grid ``(x_i - y_j)^2`` of shape ``len(x) x len(y)``."""
    return np.ascontiguousarray((x[:, None] - y[None, :]) ** 2)


def band_width(rows: int, cols: int, band: int | None) -> int:
    """
    Kernel band argument for an optional Sakoe-Chiba radius.

    Raises:
        ElasticBandError: the band admits no warping path.
    """
    if band is None:
        return -1
    if band < 0:
        raise ElasticBandError(f"band radius must be >= 0, got {band}")
    if abs(rows - cols) > band:
        raise ElasticBandError(
            f"band radius {band} admits no warping path between lengths {rows} and {cols}"
        )
    return int(band)


def dtw_distance(x: Any, y: Any, band: int | None = None) -> float:
    """
    DTW distance between ``x`` and ``y``.

    Args:
        x, y: Non-empty finite series, possibly of different lengths.
        band: Optional Sakoe-Chiba radius ``r``; cells with ``|i - j| > r``
              are excluded. Needs ``|len(x) - len(y)| <= r``.

    Raises:
        ElasticDataError: Empty or non-finite input.
        ElasticBandError: The band admits no path.
    """
    xs, ys = as_series(x), as_series(y)
    width = band_width(len(xs), len(ys), band)
    cost = _kernels.accumulate_value(squared_differences(xs, ys), width, False)
    return float(np.sqrt(cost))


def dtw_alignment(x: Any, y: Any, band: int | None = None) -> AlignmentResult:
    """Optimal alignment of ``x`` and ``y`` with its summed squared cost."""
    xs, ys = as_series(x), as_series(y)
    width = band_width(len(xs), len(ys), band)
    local = squared_differences(xs, ys)
    scores = _kernels.accumulate(local, width, False)
    rows, cols = _kernels.traceback(scores, False)
    path = WarpingPath.from_points(zip((rows + 1).tolist(), (cols + 1).tolist(), strict=True))
    return AlignmentResult(cost=float(scores[-1, -1]), path=path)


def pairwise_dtw(series: list[Series], band: int | None = None) -> np.ndarray:
    """Symmetric matrix of DTW distances with a zero diagonal."""
    n = len(series)
    dist = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            dist[a, b] = dist[b, a] = dtw_distance(series[a], series[b], band)
    logger.debug("Computed %d pairwise DTW distances", n * (n - 1) // 2)
    return dist
