"""Dense reference implementations of M^{n⊗} and P_n M^{n⊗} P_n^*.

Everything here is deliberately naive and exponential in ``n``.  It exists to
validate the compressed path in :mod:`symkron.product` and is capped:
explicit ``d**n x d**n`` matrices need ``d**n <= MAX_EXPLICIT``, mode-product
applications need ``d**n`` under the full-vector cap.
"""

import numpy as np

from .errors import ShapeError, SizeCapError
from .limits import MAX_EXPLICIT, check_explicit, check_full
from .symspace import FullVec, build_P

__all__ = [
    "kron",
    "kron_power",
    "iterated_kron_apply",
    "symmetric_kron_dense",
]


def _square(M):
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {M.shape}")
    return M


def kron(A, B):
    """Kronecker product built block by block: block ``(i, j)`` is ``A[i, j] * B``."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    rows, cols = A.shape[0] * B.shape[0], A.shape[1] * B.shape[1]
    if max(rows, cols) > MAX_EXPLICIT:
        raise SizeCapError(f"Kronecker product of size {rows}x{cols} exceeds cap {MAX_EXPLICIT}")
    p, q = B.shape
    out = np.zeros((rows, cols), dtype=complex)
    for i in range(A.shape[0]):
        for j in range(A.shape[1]):
            out[i * p:(i + 1) * p, j * q:(j + 1) * q] = A[i, j] * B
    return out


def kron_power(M, n):
    """The explicit ``d**n x d**n`` matrix ``M ⊗ ... ⊗ M``."""
    M = _square(M)
    check_explicit(M.shape[0], n)
    out = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        out = kron(out, M)
    return out


def _apply_modes(M, n, data):
    d = M.shape[0]
    tensor = data.reshape((d,) * n) if n else data.reshape(())
    for axis in range(n):
        tensor = np.moveaxis(np.tensordot(M, tensor, axes=(1, axis)), 0, axis)
    return tensor.reshape(-1)


def iterated_kron_apply(M, n, x, method="auto"):
    """``M^{n⊗} x`` for a :class:`FullVec` ``x``.

    ``method="explicit"`` multiplies by :func:`kron_power`; ``method="modes"``
    contracts ``M`` along each axis of ``x`` reshaped to a ``d x ... x d``
    tensor.  ``"auto"`` picks the explicit build when it fits.
    """
    M = _square(M)
    d = M.shape[0]
    if (x.dim, x.order) != (d, n):
        raise ShapeError(f"vector has dim {x.dim}, order {x.order}; operator has {d}, {n}")
    check_full(d, n, "iterated Kronecker apply")
    if method == "auto":
        method = "explicit" if d**n <= MAX_EXPLICIT else "modes"
    if method == "explicit":
        data = kron_power(M, n) @ x.data
    elif method == "modes":
        data = _apply_modes(M, n, x.data)
    else:
        raise ValueError(f"unknown method {method!r}")
    return FullVec(d, n, data)


def symmetric_kron_dense(M, n):
    """``S_n(M) = P_n M^{n⊗} P_n^*`` assembled literally from dense factors."""
    M = _square(M)
    d = M.shape[0]
    check_explicit(d, n, "dense symmetric Kronecker product")
    P = build_P(d, n).to_dense()
    return P @ kron_power(M, n) @ P.T
