"""
pytest fixtures and brute-force oracles for python-elasticts tests.
"""

from __future__ import annotations

from functools import cache
from pathlib import Path

import numpy as np
import pytest

from elasticts.maps import elastic_inner_product
from elasticts.models import Dataset, GridDims, WarpingPath
from elasticts.warping import enumerate_warping_paths

# ---------------------------------------------------------------------------
# Brute-force oracles (used in multiple test modules)
# ---------------------------------------------------------------------------


@cache
def all_paths(rows: int, cols: int) -> tuple[WarpingPath, ...]:
    """Every warping path of a ``rows x cols`` grid, memoised per shape."""
    return tuple(enumerate_warping_paths(GridDims(rows, cols)))


def oracle_inner_product(x: np.ndarray, W: np.ndarray) -> float:
    """max over all paths of sum x_i * W_ij."""
    return max(
        float(np.sum(x[p.row_index] * W[p.row_index, p.col_index]))
        for p in all_paths(len(x), W.shape[1])
    )


def oracle_euclidean_cost(x: np.ndarray, Y: np.ndarray) -> float:
    """min over all paths of sum (x_i - Y_ij)^2."""
    return min(
        float(np.sum((x[p.row_index] - Y[p.row_index, p.col_index]) ** 2))
        for p in all_paths(len(x), Y.shape[1])
    )


def oracle_dtw_cost(x: np.ndarray, y: np.ndarray) -> float:
    """min over all paths of sum (x_i - y_j)^2."""
    return min(
        float(np.sum((x[p.row_index] - y[p.col_index]) ** 2)) for p in all_paths(len(x), len(y))
    )


# ---------------------------------------------------------------------------
# Planted datasets
# ---------------------------------------------------------------------------


def offset_dataset(
    rng: np.random.Generator, per_class: int = 6, length: int = 4, spread: float = 0.1
) -> Dataset:
    """
    Two classes around the constant series ``+1`` and ``-1``.

    Linearly separable through the origin with a wide margin, so the
    perceptron family reaches zero training error within a few updates.
    """
    pos = [1.0 + rng.uniform(-spread, spread, length) for _ in range(per_class)]
    neg = [-(1.0 + rng.uniform(-spread, spread, length)) for _ in range(per_class)]
    labels = [1] * per_class + [-1] * per_class
    return Dataset(
        labels=np.asarray(labels), series=pos + neg, name="Offset", label_codes=("-1", "1")
    )


def planted_separable(
    rng: np.random.Generator, W_star: np.ndarray, per_class: int = 10, max_draws: int = 20_000
) -> Dataset:
    """
    Examples with margin at least 1 under ``(W_star, 0)`` along every warping path.

    A positive needs ``min_phi <x (x)_phi 0, W_star> >= 1`` and a negative
    ``max_phi <x (x)_phi 0, W_star> <= -1``; candidates in between are dropped.
    """
    n = W_star.shape[0]
    pos: list[np.ndarray] = []
    neg: list[np.ndarray] = []
    for _ in range(max_draws):
        if len(pos) >= per_class and len(neg) >= per_class:
            break
        x = rng.normal(size=n)
        lowest = -elastic_inner_product(x, -W_star)
        highest = elastic_inner_product(x, W_star)
        if lowest >= 1.0 and len(pos) < per_class:
            pos.append(x)
        elif highest <= -1.0 and len(neg) < per_class:
            neg.append(x)
    assert len(pos) == per_class, "planted margin too rare for this W_star"
    assert len(neg) == per_class, "planted margin too rare for this W_star"
    labels = [1] * per_class + [-1] * per_class
    return Dataset(labels=np.asarray(labels), series=pos + neg, name="Planted")


def write_rows(path: Path, rows: list[tuple[str, list[float]]], delimiter: str = ",") -> Path:
    """Write ``(label, samples)`` rows in the dataset file format."""
    lines = [delimiter.join([label, *(repr(float(v)) for v in values)]) for label, values in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator; every test gets the same stream."""
    return np.random.default_rng(20_240_601)


@pytest.fixture
def offset_split(tmp_path: Path, rng: np.random.Generator) -> tuple[Path, Path]:
    """
    Train/test files of the offset problem with raw labels ``1`` / ``2``.

    The test file repeats the first training rows, so a classifier with zero
    training error also has zero test error.
    """
    train_set = offset_dataset(rng, per_class=6)
    rows = [("2" if y == 1 else "1", x.tolist()) for x, y in train_set]
    train_path = write_rows(tmp_path / "Offset_TRAIN.tsv", rows, delimiter="\t")
    test_path = write_rows(tmp_path / "Offset_TEST.tsv", rows[:3] + rows[6:9], delimiter="\t")
    return train_path, test_path


@pytest.fixture
def coffee_like(tmp_path: Path) -> Path:
    """Two-row dataset ``1,0.0,1.0`` / ``-1,1.0,0.0``."""
    path = tmp_path / "Tiny_TRAIN.csv"
    path.write_text("1,0.0,1.0\n-1,1.0,0.0\n", encoding="utf-8")
    return path
