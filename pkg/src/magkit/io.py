"""CSV ingestion and small serialization helpers."""

from __future__ import annotations

import csv
import hashlib

import numpy as np

from .errors import EmptyInput, InputError


def _is_number(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def read_numeric_csv(path) -> np.ndarray:
    """Read a comma-separated numeric table.

    The first row is treated as a header if any of its cells is not a number.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if rows and not all(_is_number(c.strip()) for c in rows[0]):
        rows = rows[1:]
    if not rows:
        raise EmptyInput(f"{path}: no data rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise InputError(f"{path}: ragged rows")
    try:
        return np.array([[float(c) for c in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def read_points(path) -> np.ndarray:
    return read_numeric_csv(path)


def read_dist(path) -> np.ndarray:
    return read_numeric_csv(path)


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return "sha256:" + h.hexdigest()


def write_weights(path, w) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["point_id", "weight"])
        writer.writerows((i, repr(float(x))) for i, x in enumerate(w))
