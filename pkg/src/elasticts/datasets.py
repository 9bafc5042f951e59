"""
elasticts.datasets — UCR-style dataset files and cross-validation folds.

File format: one example per line, the class label first, then the samples.
Fields are separated by tabs or commas (autodetected per file; whitespace is
accepted as a last resort). Blank lines are ignored, ``.`` is the decimal
separator and scientific notation is fine. Trailing ``NaN`` fields are
padding for variable-length series and are dropped.

Two-class label mapping: the two distinct raw labels are ordered by numeric
value; the smaller becomes ``-1`` and the larger ``+1``. A test split must be
loaded with the training split's ``label_codes`` so both map the same way.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import NDArray
from sklearn.model_selection import LeaveOneOut, StratifiedKFold

from .const import CV_FOLDS, LOO_MAX_SIZE
from .exceptions import ElasticDataError, ElasticFormatError
from .models import Dataset, Series

if TYPE_CHECKING:
    from collections.abc import Sequence

logger = logging.getLogger(__name__)

Fold = tuple[NDArray[np.intp], NDArray[np.intp]]


def _detect_delimiter(line: str) -> str | None:
    if "\t" in line:
        return "\t"
    if "," in line:
        return ","
    return None


def _parse_float(text: str, row: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ElasticFormatError(f"not a number: {text.strip()[:32]!r}", row=row) from None


def _parse_rows(text: str, delimiter: str | None) -> tuple[list[str], list[Series]]:
    labels: list[str] = []
    series: list[Series] = []
    sep = delimiter
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if sep is None and not labels:
            sep = _detect_delimiter(line)
        fields = [f.strip() for f in (line.split(sep) if sep else line.split())]
        while fields and fields[-1] == "":
            fields.pop()
        _parse_float(fields[0], lineno)
        values = [_parse_float(f, lineno) for f in fields[1:]]
        while values and math.isnan(values[-1]):
            values.pop()
        if not values:
            raise ElasticFormatError("row has a label but no samples", row=lineno)
        if not all(math.isfinite(v) for v in values):
            raise ElasticFormatError("row contains NaN or infinite samples", row=lineno)
        labels.append(fields[0])
        series.append(np.asarray(values, dtype=np.float64))
    return labels, series


def read_series(path: str | Path, delimiter: str | None = None) -> tuple[list[str], list[Series]]:
    """
    Raw labels and series of a dataset file, in file order.

    Args:
        path:      Dataset file.
        delimiter: Field separator; autodetected from the first data row if omitted.

    Raises:
        ElasticDataError: the file does not exist or cannot be read.
        ElasticFormatError: a row is unparseable (``row`` holds its line number).
    """
    file = Path(path)
    try:
        text = file.read_text(encoding="utf-8")
    except OSError as exc:
        raise ElasticDataError(f"cannot read dataset {file}: {exc.strerror or exc}") from exc
    try:
        return _parse_rows(text, delimiter)
    except ElasticFormatError as exc:
        raise ElasticFormatError(f"{file.name}: {exc.args[0]}", row=exc.row) from None


def _label_codes(raw: Sequence[str]) -> tuple[str, str]:
    distinct: dict[float, str] = {}
    for label in raw:
        distinct.setdefault(float(label), label)
    if len(distinct) != 2:
        raise ElasticDataError(f"a two-class run needs exactly two labels, found {len(distinct)}")
    low, high = sorted(distinct)
    return distinct[low], distinct[high]


def z_normalize(x: Series) -> Series:
    """Zero mean, unit standard deviation; a constant series becomes all zeros."""
    centred = x - x.mean()
    std = float(x.std())
    return centred / std if std > 0.0 else centred


def load_dataset(
    path: str | Path,
    delimiter: str | None = None,
    *,
    label_codes: tuple[str, str] | None = None,
    z_normalized: bool = False,
    name: str | None = None,
) -> Dataset:
    """
    Load a two-class dataset with labels mapped to ``{+1, -1}``.

    Args:
        path:         Dataset file.
        delimiter:    Field separator override.
        label_codes:  ``(raw label for -1, raw label for +1)`` taken from the
                      training split; derived from this file when omitted.
        z_normalized: Z-normalize every series.
        name:         Dataset name; defaults to the file stem without a
                      ``_TRAIN`` / ``_TEST`` suffix.

    Raises:
        ElasticDataError: fewer than two rows, not exactly two classes, or a
            label outside ``label_codes``.
        ElasticFormatError: unparseable row.
    """
    raw, series = read_series(path, delimiter)
    if len(series) < 2:
        raise ElasticDataError(f"dataset {path} has {len(series)} row(s); at least 2 are required")
    codes = label_codes or _label_codes(raw)
    mapping = {float(codes[0]): -1, float(codes[1]): 1}
    labels = np.empty(len(raw), dtype=np.int64)
    for idx, label in enumerate(raw):
        try:
            labels[idx] = mapping[float(label)]
        except KeyError:
            raise ElasticDataError(
                f"label {label!r} is not one of the training labels {codes}"
            ) from None
    if z_normalized:
        series = [z_normalize(x) for x in series]
    stem = Path(path).stem
    for suffix in ("_TRAIN", "_TEST"):
        stem = stem.removesuffix(suffix)
    dataset = Dataset(labels=labels, series=series, name=name or stem, label_codes=codes)
    logger.debug(
        "Loaded %s: %d series, longest %d, label codes %s",
        dataset.name,
        len(dataset),
        dataset.max_length,
        codes,
    )
    return dataset


def write_dataset(path: str | Path, dataset: Dataset, delimiter: str = ",") -> None:
    """Write ``dataset`` in the loader's format with full float precision."""
    if dataset.label_codes is not None:
        text_for = {-1: dataset.label_codes[0], 1: dataset.label_codes[1]}
    else:
        text_for = {-1: "-1", 1: "1"}
    lines = [
        delimiter.join([text_for[y], *(repr(float(v)) for v in x)])
        for x, y in dataset
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def make_folds(dataset: Dataset, seed: int) -> list[Fold]:
    """
    Cross-validation folds as ``(train_idx, val_idx)`` pairs.

    Stratified 10-fold when the dataset has more than 30 examples,
    leave-one-out otherwise.

    Raises:
        ElasticDataError: fewer than two examples.
    """
    n = len(dataset)
    if n < 2:
        raise ElasticDataError("cross-validation needs at least two examples")
    placeholder = np.zeros((n, 1))
    if n > LOO_MAX_SIZE:
        splitter = StratifiedKFold(n_splits=CV_FOLDS, shuffle=True, random_state=seed)
        folds = splitter.split(placeholder, dataset.labels)
    else:
        folds = LeaveOneOut().split(placeholder)
    return [(np.asarray(tr, dtype=np.intp), np.asarray(va, dtype=np.intp)) for tr, va in folds]
