"""The symmetric subspace X_n of C^(d**n) and its orthonormal basis.

A vector of ``C^(d**n)`` lies in ``X_n`` when its components agree on every
class of the redundant enumeration.  The rows of the sparse ``L_n x d**n``
matrix ``P_n`` are the normalised class indicators; ``compress`` and
``expand`` apply ``P_n`` and ``P_n^*`` through their closed forms.
"""

import json
from dataclasses import dataclass

import numpy as np

from . import multiindex as mi
from .errors import ShapeError, SymmetryError
from .limits import check_full

__all__ = [
    "SymVec",
    "FullVec",
    "BasisMatrix",
    "is_symmetric",
    "basis_vector",
    "basis_entry",
    "build_P",
    "compress",
    "expand",
    "read_basis_json",
]

DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class SymVec:
    """Compressed vector of length ``L_n``, components in canonical label order."""

    dim: int
    order: int
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex).reshape(-1)
        size = mi.level_size(self.dim, self.order)
        if data.shape[0] != size:
            raise ShapeError(
                f"SymVec of dim {self.dim}, order {self.order} needs {size} entries, "
                f"got {data.shape[0]}"
            )
        object.__setattr__(self, "data", data)

    @property
    def labels(self):
        return mi.lex_enumerate(self.dim, self.order)

    def __len__(self):
        return self.data.shape[0]


@dataclass(frozen=True)
class FullVec:
    """Dense vector of length ``d**n`` indexed by the redundant enumeration."""

    dim: int
    order: int
    data: np.ndarray

    def __post_init__(self):
        size = check_full(self.dim, self.order)
        data = np.asarray(self.data, dtype=complex).reshape(-1)
        if data.shape[0] != size:
            raise ShapeError(
                f"FullVec of dim {self.dim}, order {self.order} needs {size} entries, "
                f"got {data.shape[0]}"
            )
        object.__setattr__(self, "data", data)

    def __len__(self):
        return self.data.shape[0]


def _class_sizes(d, n):
    return np.array([mi.multinomial(n, k) for k in mi.lex_enumerate(d, n)], dtype=float)


def _first_indices(d, n):
    labels = mi.redundant_labels(d, n)
    _, first = np.unique(labels, return_index=True)
    return first


def _violation(x, tol):
    data = x.data
    scale = np.abs(data).max() if data.size else 0.0
    if scale == 0.0:
        return None
    labels = mi.redundant_labels(x.dim, x.order)
    first = _first_indices(x.dim, x.order)
    reference = data[first][labels]
    diff = np.abs(data - reference)
    worst = int(np.argmax(diff))
    if diff[worst] > tol * scale:
        return int(first[labels[worst]]) + 1, worst + 1
    return None


def is_symmetric(x, tol=DEFAULT_TOL):
    """True if ``x`` is constant on every class up to ``tol`` times its max-norm."""
    return _violation(x, tol) is None


def basis_vector(d, n, i):
    """The orthonormal basis vector ``p_i`` of ``X_n`` as a :class:`FullVec`."""
    check_full(d, n, "basis vector")
    positions = mi.sigma_set(d, n, i)
    data = np.zeros(d**n, dtype=complex)
    data[np.array(positions) - 1] = 1.0 / np.sqrt(len(positions))
    return FullVec(d, n, data)


def basis_entry(d, n, i, j):
    """Entry ``(i, j)`` of ``P_n`` (1-based), without building anything of size ``d**n``."""
    if not 1 <= j <= d**n:
        raise IndexError(f"column {j} outside 1..{d**n}")
    if mi.redundant_entry(d, n, j) != mi.lex_enumerate(d, n)[i - 1]:
        return 0.0
    return 1.0 / np.sqrt(mi.sigma_cardinality(d, n, i))


@dataclass(frozen=True)
class BasisMatrix:
    """Sparse ``P_n`` stored per row as one value and a list of 1-based columns."""

    dim: int
    order: int
    values: tuple
    columns: tuple

    @property
    def shape(self):
        return len(self.values), self.dim**self.order

    def triplets(self):
        return [
            (i + 1, int(j), float(value))
            for i, (value, cols) in enumerate(zip(self.values, self.columns))
            for j in cols
        ]

    def to_dense(self):
        dense = np.zeros(self.shape)
        for i, (value, cols) in enumerate(zip(self.values, self.columns)):
            dense[i, np.asarray(cols) - 1] = value
        return dense

    def to_json(self):
        rows, cols = self.shape
        return {
            "dim": self.dim,
            "order": self.order,
            "rows": rows,
            "cols": cols,
            "triplets": [list(t) for t in self.triplets()],
        }


def build_P(d, n):
    """Explicit sparse ``P_n``; capped at ``d**n`` under the full-vector cap."""
    check_full(d, n, "basis matrix")
    labels = mi.redundant_labels(d, n)
    order = np.argsort(labels, kind="stable")
    counts = np.bincount(labels, minlength=mi.level_size(d, n))
    splits = np.cumsum(counts)[:-1]
    columns = tuple(tuple(int(j) + 1 for j in group) for group in np.split(order, splits))
    values = tuple(1.0 / np.sqrt(float(c)) for c in counts)
    return BasisMatrix(d, n, values, columns)


def read_basis_json(payload):
    """Inverse of :meth:`BasisMatrix.to_json`; accepts a dict or a JSON string."""
    if isinstance(payload, str):
        payload = json.loads(payload)
    d, n = int(payload["dim"]), int(payload["order"])
    rows = int(payload["rows"])
    values = [None] * rows
    columns = [[] for _ in range(rows)]
    for i, j, value in payload["triplets"]:
        values[i - 1] = float(value)
        columns[i - 1].append(int(j))
    if any(v is None for v in values):
        raise ShapeError("basis JSON has an empty row")
    return BasisMatrix(d, n, tuple(values), tuple(tuple(c) for c in columns))


def compress(x, tol=DEFAULT_TOL, mode="first"):
    """``P_n x`` for ``x`` in ``X_n``.

    ``mode="first"`` reads each class at its first position; ``mode="average"``
    uses the class mean, for inputs that are only approximately symmetric.
    Raises :class:`SymmetryError` naming an offending index pair if ``x`` is
    not symmetric within ``tol``.
    """
    pair = _violation(x, tol)
    if pair is not None:
        raise SymmetryError(
            f"vector is not symmetric: components {pair[0]} and {pair[1]} differ",
            pair=pair,
        )
    d, n = x.dim, x.order
    counts = _class_sizes(d, n)
    if mode == "first":
        representative = x.data[_first_indices(d, n)]
    elif mode == "average":
        labels = mi.redundant_labels(d, n)
        sums = np.bincount(labels, weights=x.data.real, minlength=counts.size) + 1j * np.bincount(
            labels, weights=x.data.imag, minlength=counts.size
        )
        representative = sums / counts
    else:
        raise ValueError(f"unknown compress mode {mode!r}")
    return SymVec(d, n, np.sqrt(counts) * representative)


def expand(y):
    """``P_n^* y``: every position of class ``i`` gets ``y_i / sqrt(#class)``."""
    d, n = y.dim, y.order
    check_full(d, n, "expand")
    scaled = y.data / np.sqrt(_class_sizes(d, n))
    return FullVec(d, n, scaled[mi.redundant_labels(d, n)])
