"""
elasticts._codec — zlib encode/decode helpers for model containers.

Trained classifiers and prototype sets are stored as zlib-compressed compact
JSON. Floats are written with ``repr`` precision so a round trip is lossless.
Plain (uncompressed) JSON is accepted on read, which makes hand-edited
fixtures easy to load. The layout is documented in ``docs/formats.md``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, cast
import zlib

import numpy as np

from .const import CONTAINER_CLASSIFIER, CONTAINER_PROTOTYPES, FORMAT_VERSION
from .exceptions import ElasticFormatError
from .models import ClassifierModel, ElasticParams, LossKind, Matrix, NNMode, PrototypeSet


def encode(payload: dict[str, Any]) -> bytes:
    """
    Encode a dict to a zlib-compressed JSON byte string.

    Example::

        from elasticts._codec import encode, decode
        raw = encode({"kind": "classifier", "b": 0.25})
        assert decode(raw) == {"kind": "classifier", "b": 0.25}
    """
    text = json.dumps(payload, separators=(",", ":"), allow_nan=False)
    return zlib.compress(text.encode("utf-8"))


def decode(data: bytes) -> dict[str, Any]:
    """
    Decode a zlib-compressed JSON byte string, falling back to plain JSON.

    Raises:
        ElasticFormatError: neither form parses to a JSON object.
    """
    try:
        payload = json.loads(zlib.decompress(data))
    except (zlib.error, json.JSONDecodeError, UnicodeDecodeError):
        try:
            payload = json.loads(data)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise ElasticFormatError(f"container is neither zlib JSON nor JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ElasticFormatError("container must hold a JSON object")
    return cast("dict[str, Any]", payload)


# ---------------------------------------------------------------------------
# Containers
# ---------------------------------------------------------------------------


def _check_header(payload: dict[str, Any], kind: str) -> None:
    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise ElasticFormatError(f"unsupported container format version {version!r}")
    if payload.get("kind") != kind:
        raise ElasticFormatError(f"expected a {kind!r} container, got {payload.get('kind')!r}")


def _matrix_from(flat: Any, n: int, m: int) -> Matrix:
    try:
        values = np.asarray(flat, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ElasticFormatError(f"matrix entries are not numeric: {exc}") from exc
    if values.shape != (n * m,):
        raise ElasticFormatError(f"expected {n * m} matrix entries, got {values.size}")
    return values.reshape(n, m)


def encode_model(model: ClassifierModel) -> bytes:
    """Classifier container: loss kind, ``n``, ``m``, bias, row-major ``W`` and label codes."""
    theta = model.theta
    return encode(
        {
            "format_version": FORMAT_VERSION,
            "kind": CONTAINER_CLASSIFIER,
            "loss": model.loss.value,
            "n": theta.n,
            "m": theta.m,
            "b": theta.b,
            "W": theta.W.ravel().tolist(),
            "label_codes": list(model.label_codes) if model.label_codes else None,
        }
    )


def decode_model(data: bytes) -> ClassifierModel:
    """
    Inverse of :func:`encode_model`.

    Raises:
        ElasticFormatError: wrong version, kind or shape.
    """
    payload = decode(data)
    _check_header(payload, CONTAINER_CLASSIFIER)
    try:
        n, m = int(payload["n"]), int(payload["m"])
        kind = LossKind(payload["loss"])
        b = float(payload["b"])
        W = _matrix_from(payload["W"], n, m)
        codes = payload.get("label_codes")
        label_codes = (str(codes[0]), str(codes[1])) if codes else None
    except (KeyError, ValueError, TypeError, IndexError) as exc:
        raise ElasticFormatError(f"malformed classifier container: {exc}") from exc
    return ClassifierModel(ElasticParams(W, b), kind, label_codes)


def encode_prototypes(prototypes: PrototypeSet) -> bytes:
    """Prototype container: NN mode, class labels and one row-major matrix per label."""
    shapes = {p.shape for p in prototypes.prototypes}
    if len(shapes) > 1:
        raise ElasticFormatError(f"prototypes must share one shape, got {sorted(shapes)}")
    n, m = shapes.pop() if shapes else (0, 0)
    return encode(
        {
            "format_version": FORMAT_VERSION,
            "kind": CONTAINER_PROTOTYPES,
            "mode": prototypes.mode.value,
            "n": n,
            "m": m,
            "labels": [int(label) for label in prototypes.labels],
            "prototypes": [p.ravel().tolist() for p in prototypes.prototypes],
        }
    )


def decode_prototypes(data: bytes) -> PrototypeSet:
    """Inverse of :func:`encode_prototypes`."""
    payload = decode(data)
    _check_header(payload, CONTAINER_PROTOTYPES)
    try:
        n, m = int(payload["n"]), int(payload["m"])
        matrices = [_matrix_from(flat, n, m) for flat in payload["prototypes"]]
        return PrototypeSet(
            mode=NNMode(payload["mode"]),
            labels=[int(label) for label in payload["labels"]],
            prototypes=matrices,
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ElasticFormatError(f"malformed prototype container: {exc}") from exc


# ---------------------------------------------------------------------------
# Files
# ---------------------------------------------------------------------------


def save_model(path: str | Path, model: ClassifierModel) -> None:
    Path(path).write_bytes(encode_model(model))


def load_model(path: str | Path) -> ClassifierModel:
    return decode_model(_read(path))


def save_prototypes(path: str | Path, prototypes: PrototypeSet) -> None:
    Path(path).write_bytes(encode_prototypes(prototypes))


def load_prototypes(path: str | Path) -> PrototypeSet:
    return decode_prototypes(_read(path))


def _read(path: str | Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise ElasticFormatError(f"cannot read container {path}: {exc.strerror or exc}") from exc
