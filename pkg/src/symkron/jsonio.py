"""JSON and CSV interchange formats.

Complex scalars are two-element ``[re, im]`` arrays; matrices are nested
row-major lists of them.  A compressed vector is
``{"dim", "order", "labels"?, "data"}`` with ``labels`` optional (canonical
order implied).  Parameters are ``{"dim", "hbar", "A", "B"}``.
"""

import csv
import io
import json

import numpy as np

from . import multiindex as mi
from .errors import ShapeError, SymKronError
from .hagedorn import ParamPair
from .symspace import SymVec

__all__ = [
    "ParseError",
    "encode_complex",
    "decode_complex",
    "encode_matrix",
    "decode_matrix",
    "symvec_to_json",
    "symvec_from_json",
    "params_to_json",
    "params_from_json",
    "read_points_csv",
    "load_json",
    "dumps",
]


class ParseError(SymKronError, ValueError):
    """Malformed input document."""


def encode_complex(z):
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(value):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ParseError(f"complex scalar must be [re, im], got {value!r}")
    re, im = value
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (re, im)):
        raise ParseError(f"complex scalar must hold two numbers, got {value!r}")
    return complex(re, im)


def encode_matrix(M):
    M = np.asarray(M, dtype=complex)
    return [[encode_complex(z) for z in row] for row in M]


def decode_matrix(value):
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise ParseError("matrix must be a non-empty list of rows")
    rows = [[decode_complex(z) for z in row] for row in value]
    if len({len(r) for r in rows}) != 1:
        raise ParseError("matrix rows have different lengths")
    return np.array(rows, dtype=complex)


def symvec_to_json(y, labels=False):
    doc = {"dim": y.dim, "order": y.order}
    if labels:
        doc["labels"] = [list(k) for k in y.labels]
    doc["data"] = [encode_complex(z) for z in y.data]
    return doc


def symvec_from_json(doc):
    try:
        d, n = int(doc["dim"]), int(doc["order"])
        data = [decode_complex(z) for z in doc["data"]]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad SymVec document: {exc}") from None
    if "labels" in doc:
        labels = [tuple(int(v) for v in k) for k in doc["labels"]]
        if len(labels) != len(data):
            raise ShapeError("labels and data differ in length")
        if len(data) != mi.level_size(d, n):
            raise ShapeError(f"SymVec needs {mi.level_size(d, n)} entries, got {len(data)}")
        if sorted(labels, reverse=True) != list(mi.lex_enumerate(d, n)):
            raise ShapeError("labels are not the multi-indices of the given order")
        ordered = [0j] * len(data)
        for k, z in zip(labels, data):
            ordered[mi.lex_rank(d, n, k) - 1] = z
        data = ordered
    return SymVec(d, n, np.array(data, dtype=complex))


def params_to_json(p):
    return {"dim": p.dim, "hbar": p.hbar, "A": encode_matrix(p.A), "B": encode_matrix(p.B)}


def params_from_json(doc):
    try:
        A = decode_matrix(doc["A"])
        B = decode_matrix(doc["B"])
        hbar = float(doc.get("hbar", 1.0))
    except (KeyError, TypeError, AttributeError) as exc:
        raise ParseError(f"bad parameter document: {exc}") from None
    if "dim" in doc and int(doc["dim"]) != A.shape[0]:
        raise ShapeError(f"dim {doc['dim']} does not match A of shape {A.shape}")
    return ParamPair(A, B, hbar)


def read_points_csv(text, d):
    """Rows of ``d`` real coordinates; blank lines and ``#`` comments are skipped."""
    points = []
    for row in csv.reader(io.StringIO(text)):
        if not row or row[0].strip().startswith("#"):
            continue
        try:
            values = [float(v) for v in row]
        except ValueError:
            if not points:
                continue  # header line
            raise ParseError(f"non-numeric point row {row!r}") from None
        if len(values) != d:
            raise ShapeError(f"point row has {len(values)} coordinates, expected {d}")
        points.append(values)
    return np.array(points, dtype=float).reshape(-1, d)


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None


def dumps(doc):
    return json.dumps(doc, sort_keys=True)
