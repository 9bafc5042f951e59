"""
elasticts._kernels — Compiled dynamic-programming kernels.

Every elastic proximity in the library is the same recurrence over a
``k x m`` grid of local terms::

    s[i, j] = local[i, j] + best(s[i-1, j-1], s[i-1, j], s[i, j-1])

with ``best`` being ``max`` for the elastic inner product and ``min`` for
DTW and the elastic Euclidean distance. Callers build ``local`` with numpy
broadcasting and pass it in as a C-contiguous float64 array.

``band < 0`` disables the Sakoe-Chiba band; otherwise cells with
``|i - j| > band`` are unreachable and hold ``-inf`` (maximise) or ``+inf``
(minimise).

Predecessor preference on ties is diagonal, then vertical ``(i-1, j)``,
then horizontal ``(i, j-1)``; the forward pass and :func:`traceback` apply
the same strict comparisons, so the traced path is the one the recurrence
selected.

The kernels release the GIL so the experiment thread pool scales.
"""

from __future__ import annotations

import numba as nb
import numpy as np

_JIT = {"nogil": True, "cache": False}


@nb.njit(**_JIT)
def _better(candidate: float, best: float, maximize: bool) -> bool:
    if maximize:
        return candidate > best
    return candidate < best


@nb.njit(**_JIT)
def accumulate(local: np.ndarray, band: int, maximize: bool) -> np.ndarray:
    """Full score matrix of the recurrence."""
    k, m = local.shape
    fill = -np.inf if maximize else np.inf
    scores = np.full((k, m), fill)
    for i in range(k):
        lo = 0 if band < 0 else max(0, i - band)
        hi = m if band < 0 else min(m, i + band + 1)
        for j in range(lo, hi):
            if i == 0 and j == 0:
                scores[0, 0] = local[0, 0]
                continue
            best = fill
            if i > 0 and j > 0:
                best = scores[i - 1, j - 1]
            if i > 0 and _better(scores[i - 1, j], best, maximize):
                best = scores[i - 1, j]
            if j > 0 and _better(scores[i, j - 1], best, maximize):
                best = scores[i, j - 1]
            scores[i, j] = local[i, j] + best
    return scores


@nb.njit(**_JIT)
def accumulate_value(local: np.ndarray, band: int, maximize: bool) -> float:
    """Final score ``s[k-1, m-1]`` using two rolling rows."""
    k, m = local.shape
    fill = -np.inf if maximize else np.inf
    prev = np.full(m, fill)
    cur = np.full(m, fill)
    for i in range(k):
        cur[:] = fill
        lo = 0 if band < 0 else max(0, i - band)
        hi = m if band < 0 else min(m, i + band + 1)
        for j in range(lo, hi):
            if i == 0 and j == 0:
                cur[0] = local[0, 0]
                continue
            best = fill
            if i > 0 and j > 0:
                best = prev[j - 1]
            if i > 0 and _better(prev[j], best, maximize):
                best = prev[j]
            if j > 0 and _better(cur[j - 1], best, maximize):
                best = cur[j - 1]
            cur[j] = local[i, j] + best
        prev, cur = cur, prev
    return prev[m - 1]


@nb.njit(**_JIT)
def traceback(scores: np.ndarray, maximize: bool) -> tuple[np.ndarray, np.ndarray]:
    """0-based ``(rows, cols)`` of the selected path, from ``(0, 0)`` to ``(k-1, m-1)``."""
    k, m = scores.shape
    rows = np.empty(k + m - 1, dtype=np.intp)
    cols = np.empty(k + m - 1, dtype=np.intp)
    i = k - 1
    j = m - 1
    n = 0
    rows[n] = i
    cols[n] = j
    n += 1
    while i > 0 or j > 0:
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            bi = i - 1
            bj = j - 1
            best = scores[i - 1, j - 1]
            if _better(scores[i - 1, j], best, maximize):
                best = scores[i - 1, j]
                bi = i - 1
                bj = j
            if _better(scores[i, j - 1], best, maximize):
                bi = i
                bj = j - 1
            i = bi
            j = bj
        rows[n] = i
        cols[n] = j
        n += 1
    return rows[:n][::-1].copy(), cols[:n][::-1].copy()
