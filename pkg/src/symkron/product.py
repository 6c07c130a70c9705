"""Matrix-free n-fold symmetric Kronecker products.

For ``M`` with rows ``m_1, ..., m_d`` and an output label ``k`` of modulus
``n``, the coefficient of label ``β`` is

    c_k(β) = Σ_{α_1 + ... + α_d = β, |α_j| = k_j}  Π_j binom(k_j, α_j) m_j^{α_j},

and

    (M^{n⊗} x)_k = Σ_β c_k(β) x_β,
    (S_n(M) y)_k = Σ_β c_k(β) sqrt(β! / k!) y_β.

The nested sums are evaluated axis by axis, grouping terms by their partial
sums ``α_1 + ... + α_j``.  Every temporary has at most ``L_n`` rows, so
nothing of size ``d**n`` is ever allocated.
"""

import numpy as np

from . import multiindex as mi
from .errors import ShapeError, SizeCapError
from .symspace import SymVec

__all__ = [
    "SymKronOperator",
    "monomial_tables",
    "apply",
    "apply_kron_compressed",
    "materialize",
    "check_adjoint",
    "check_inverse",
    "check_unitary",
    "MATERIALIZE_MAX_ROWS",
]

#: largest L_n for which :func:`materialize` builds the dense L_n x L_n matrix
MATERIALIZE_MAX_ROWS = 4096

_EXACT_FACTORIAL_LIMIT = 20


def monomial_tables(row, max_order, method="incremental"):
    """Powers ``row**α`` for every ``|α| <= max_order``, one array per modulus.

    ``method="incremental"`` reuses the previous modulus: ``row**α`` equals
    ``row**(α - e_i) * row[i]`` with ``i`` the first nonzero entry of ``α``.
    ``method="direct"`` evaluates each power from scratch.  Zero exponents
    contribute an empty product, so zero entries of ``row`` need no special
    case.
    """
    row = np.asarray(row, dtype=complex)
    d = row.shape[0]
    tables = [np.ones(1, dtype=complex)]
    for m in range(1, max_order + 1):
        alphas = mi.lex_array(d, m)
        if method == "direct":
            tables.append(np.prod(row[None, :] ** alphas, axis=1))
        elif method == "incremental":
            first = np.argmax(alphas > 0, axis=1)
            parents = alphas.copy()
            parents[np.arange(len(alphas)), first] -= 1
            tables.append(tables[m - 1][mi.lex_ranks(parents)] * row[first])
        else:
            raise ValueError(f"unknown monomial method {method!r}")
    return tables


def _multinomial_weights(d, m):
    return np.array([mi.multinomial(m, a) for a in mi.lex_enumerate(d, m)], dtype=float)


class SymKronOperator:
    """``S_n(M)`` as a matrix-free operator on compressed vectors.

    Construction tabulates ``binom(m, α) m_j^α`` for every row ``j`` and every
    ``|α| <= n``; these tables depend on ``M`` but not on the vector.  After
    construction the operator is immutable and :meth:`apply` may be called
    concurrently.
    """

    def __init__(self, M, n, monomials="incremental"):
        M = np.array(M, dtype=complex)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ShapeError(f"expected a square matrix, got shape {M.shape}")
        if int(n) != n or n < 0:
            raise ValueError(f"order must be a non-negative integer, got {n!r}")
        M.setflags(write=False)
        self.M = M
        self.dim = d = M.shape[0]
        self.order = n = int(n)
        self.size = mi.level_size(d, n)
        self._labels = mi.lex_array(d, n)
        for m in range(n + 1):
            mi.lex_array(d, m)
        weights = [_multinomial_weights(d, m) for m in range(n + 1)]
        self._terms = []
        for j in range(d):
            tables = monomial_tables(M[j], n, method=monomials)
            self._terms.append([w * t for w, t in zip(weights, tables)])
        if n <= _EXACT_FACTORIAL_LIMIT:
            self._sqrt_fact = mi.sqrt_factorials(d, n)
            self._log_sqrt_fact = None
        else:
            self._sqrt_fact = None
            self._log_sqrt_fact = mi.log_sqrt_factorials(d, n)

    @property
    def shape(self):
        return self.size, self.size

    def __repr__(self):
        return f"SymKronOperator(dim={self.dim}, order={self.order}, size={self.size})"

    def kron_row(self, i):
        """Coefficients ``c_k(β)`` for the 0-based output label ``i``, over all ``β``."""
        d = self.dim
        k = self._labels[i]
        poly = np.ones(1, dtype=complex)
        degree = 0
        for j in range(d):
            if k[j] == 0:
                continue
            poly = _convolve(d, poly, degree, self._terms[j][k[j]], int(k[j]))
            degree += int(k[j])
        return poly

    def sqrt_factorial_ratio(self, i):
        """``sqrt(β! / k!)`` over all ``β`` for the 0-based output label ``i``."""
        if self._sqrt_fact is not None:
            return self._sqrt_fact / self._sqrt_fact[i]
        return np.exp(self._log_sqrt_fact - self._log_sqrt_fact[i])

    def row(self, i):
        """Row ``i`` (0-based) of ``S_n(M)``."""
        return self.kron_row(i) * self.sqrt_factorial_ratio(i)

    def _check(self, data):
        data = np.asarray(data, dtype=complex).reshape(-1)
        if data.shape[0] != self.size:
            raise ShapeError(f"vector of length {data.shape[0]}, operator expects {self.size}")
        return data

    def apply(self, y):
        """``S_n(M) y`` for a :class:`SymVec` or a length ``L_n`` array."""
        if isinstance(y, SymVec):
            if (y.dim, y.order) != (self.dim, self.order):
                raise ShapeError(
                    f"SymVec has dim {y.dim}, order {y.order}; "
                    f"operator has {self.dim}, {self.order}"
                )
            return SymVec(self.dim, self.order, self._apply(y.data))
        return self._apply(self._check(y))

    def _apply(self, data):
        out = np.empty(self.size, dtype=complex)
        for i in range(self.size):
            out[i] = self.row(i) @ data
        return out

    def apply_kron(self, x):
        """Distinct components of ``M^{n⊗} x``, given those of ``x`` in label order."""
        data = self._check(x.data if isinstance(x, SymVec) else x)
        out = np.empty(self.size, dtype=complex)
        for i in range(self.size):
            out[i] = self.kron_row(i) @ data
        if isinstance(x, SymVec):
            return SymVec(self.dim, self.order, out)
        return out

    def materialize(self):
        if self.size > MATERIALIZE_MAX_ROWS:
            raise SizeCapError(
                f"L_n = {self.size} exceeds the materialisation budget {MATERIALIZE_MAX_ROWS}"
            )
        return np.array([self.row(i) for i in range(self.size)]).reshape(self.shape)


def _convolve(d, a, deg_a, b, deg_b):
    """Coefficients of the product of homogeneous polynomials of degrees ``deg_a``, ``deg_b``."""
    if deg_a == 0:
        return a[0] * b
    out = np.zeros(mi.level_size(d, deg_a + deg_b), dtype=complex)
    if len(a) < len(b):
        a, deg_a, b, deg_b = b, deg_b, a, deg_a
    long_alphas = mi.lex_array(d, deg_a)
    short_alphas = mi.lex_array(d, deg_b)
    for alpha, coeff in zip(short_alphas, b):
        if coeff == 0:
            continue
        # distinct targets for fixed alpha, so fancy-index += is safe
        out[mi.lex_ranks(long_alphas + alpha)] += a * coeff
    return out


def apply(op, y):
    """``S_n(M) y``; functional form of :meth:`SymKronOperator.apply`."""
    return op.apply(y)


def apply_kron_compressed(M, n, x):
    """Distinct components of ``M^{n⊗} x`` for ``x`` in ``X_n``.

    ``x`` holds the values ``x_{ℓ_n(i)}`` (not the orthonormal coordinates).
    """
    return SymKronOperator(M, n).apply_kron(x)


def materialize(M, n):
    """Dense ``L_n x L_n`` matrix ``S_n(M)``, row by row from the closed formula."""
    return SymKronOperator(M, n).materialize()


def check_adjoint(M, n):
    """Frobenius norm of ``S_n(M)^* - S_n(M^*)``."""
    M = np.asarray(M, dtype=complex)
    return float(np.linalg.norm(materialize(M, n).conj().T - materialize(M.conj().T, n)))


def check_inverse(M, n):
    """``(‖S_n(M) S_n(M^{-1}) - Id‖_F, cond(M))``; raises ``LinAlgError`` for singular ``M``."""
    M = np.asarray(M, dtype=complex)
    cond = float(np.linalg.cond(M))
    if not np.isfinite(cond) or cond > 1 / np.finfo(float).eps:
        raise np.linalg.LinAlgError(f"matrix is singular to working precision (cond={cond:.3g})")
    Minv = np.linalg.inv(M)
    S = materialize(M, n)
    residual = np.linalg.norm(S @ materialize(Minv, n) - np.eye(S.shape[0]))
    return float(residual), cond


def check_unitary(U, n):
    """Frobenius norm of ``S_n(U)^* S_n(U) - Id``."""
    S = materialize(U, n)
    return float(np.linalg.norm(S.conj().T @ S - np.eye(S.shape[0])))
