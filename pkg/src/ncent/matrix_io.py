"""CSV and JSON storage for labelled variance matrices."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .symplectic_core import Basis, BasisError, VarianceMatrix


class ParseError(ValueError):
    pass


def to_csv(V: VarianceMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(V.basis.labels)
    for row in V.matrix:
        w.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def to_json(V: VarianceMatrix) -> str:
    return json.dumps({"basis": V.basis.labels, "matrix": V.matrix.tolist()})


def _build(labels, rows) -> VarianceMatrix:
    try:
        basis = Basis.from_labels(labels)
        m = np.array(rows, dtype=float)
        return VarianceMatrix(m, basis)
    except (BasisError, ValueError, TypeError) as exc:
        raise ParseError(str(exc)) from exc


def from_csv(text: str) -> VarianceMatrix:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if len(rows) < 2:
        raise ParseError("CSV needs a header and at least one row")
    return _build(rows[0], rows[1:])


def from_json(text: str) -> VarianceMatrix:
    try:
        obj = json.loads(text)
        return _build(obj["basis"], obj["matrix"])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ParseError(str(exc)) from exc


def load(path: str | Path) -> VarianceMatrix:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(str(exc)) from exc
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        return from_json(text)
    return from_csv(text)


def save(V: VarianceMatrix, path: str | Path) -> None:
    path = Path(path)
    path.write_text(to_json(V) if path.suffix.lower() == ".json" else to_csv(V))
