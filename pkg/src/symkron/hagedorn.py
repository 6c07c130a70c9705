"""Hagedorn wave packets centred at the origin, and unitary reparametrisation.

A pair ``(A, B)`` of invertible complex ``d x d`` matrices is *valid* when
``A^T B - B^T A = 0`` and ``A^* B + B^* A = 2 Id``.  The Gaussian ground state
is

    φ_0(x) = (π ħ)^(-d/4) det(A)^(-1/2) exp(-x^T B A^{-1} x / (2ħ)),   x real,

and ``φ_k = p_k φ_0 / sqrt(2^|k| k!)`` with polynomials from the three-term
recurrence

    p_{k+e_j} = (2/√ħ) (A^{-1} x)_j p_k - 2 Σ_i (A^{-1} conj(A))_{ji} k_i p_{k-e_i}.

``det(.)^(-1/2)`` always uses the principal branch of the logarithm, so
identities involving it hold up to one global sign, which is reported.
"""

from dataclasses import dataclass

import numpy as np

from . import multiindex as mi
from .errors import InconsistentTableError, NotUnitaryError, ParamError, ShapeError
from .product import materialize

__all__ = [
    "ParamPair",
    "param_residuals",
    "validate_params",
    "harmonic_flow",
    "det_inv_sqrt",
    "branch_sign",
    "gaussian_eval",
    "polynomial_recurrence_step",
    "polynomial_table",
    "WavePacketBundle",
    "wavepacket_eval",
    "quadrature_rule",
    "gram_matrix",
    "RealignmentPlan",
    "plan_realignment",
    "Transformation",
    "transform_bundle",
]

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class ParamPair:
    A: np.ndarray
    B: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        A = np.array(self.A, dtype=complex)
        B = np.array(self.B, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape:
            raise ShapeError(f"A and B must be square of equal size, got {A.shape} and {B.shape}")
        A.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "hbar", float(self.hbar))

    @property
    def dim(self):
        return self.A.shape[0]

    def right_multiply(self, U):
        return ParamPair(self.A @ U, self.B @ U, self.hbar)


def param_residuals(A, B):
    """Frobenius residuals of both compatibility conditions."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    eye = np.eye(A.shape[0])
    return {
        "AtB - BtA = 0": float(np.linalg.norm(A.T @ B - B.T @ A)),
        "A*B + B*A = 2 Id": float(np.linalg.norm(A.conj().T @ B + B.conj().T @ A - 2 * eye)),
    }


def validate_params(A, B, hbar=1.0, tol=DEFAULT_TOL):
    """Return a :class:`ParamPair`, or raise :class:`ParamError` naming the failed condition."""
    if hbar <= 0:
        raise ParamError(f"hbar must be positive, got {hbar}", condition="hbar > 0")
    p = ParamPair(A, B, hbar)
    for name, M in (("A", p.A), ("B", p.B)):
        cond = np.linalg.cond(M)
        if not np.isfinite(cond) or cond > 1 / np.finfo(float).eps:
            raise ParamError(f"{name} is singular (cond={cond:.3g})", condition=f"{name} invertible")
    for condition, residual in param_residuals(p.A, p.B).items():
        if residual > tol:
            raise ParamError(
                f"condition {condition} violated: residual {residual:.3e} > {tol:.1e}",
                condition=condition,
                residual=residual,
            )
    width = (p.B @ np.linalg.inv(p.A)).real
    try:
        np.linalg.cholesky(0.5 * (width + width.T))
    except np.linalg.LinAlgError:
        raise ParamError("Re(B A^-1) is not positive definite", condition="Re(BA^-1) > 0")
    return p


def harmonic_flow(A0, B0, t):
    """Exact harmonic oscillator flow of the parameter pair at time ``t``."""
    A0 = np.asarray(A0, dtype=complex)
    B0 = np.asarray(B0, dtype=complex)
    c, s = np.cos(t), np.sin(t)
    return c * A0 + 1j * s * B0, 1j * s * A0 + c * B0


def det_inv_sqrt(M):
    """``det(M)^(-1/2)`` on the principal branch."""
    return np.exp(-0.5 * np.log(complex(np.linalg.det(M))))


def branch_sign(A, U):
    """The sign ``s`` with ``det(AU)^(-1/2) = s det(U)^(-1/2) det(A)^(-1/2)``."""
    ratio = det_inv_sqrt(np.asarray(A) @ np.asarray(U)) / (det_inv_sqrt(U) * det_inv_sqrt(A))
    return 1 if ratio.real > 0 else -1


def _points(points, d):
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x.reshape(-1, d) if d > 1 else x.reshape(-1, 1)
    if x.shape[1] != d:
        raise ShapeError(f"points have {x.shape[1]} coordinates, parameters have {d}")
    return x


def gaussian_eval(p, points):
    """``φ_0[A, B]`` at the rows of ``points``."""
    d = p.dim
    x = _points(points, d)
    C = p.B @ np.linalg.inv(p.A)
    quad = np.einsum("ni,ij,nj->n", x, C, x)
    return (np.pi * p.hbar) ** (-d / 4) * det_inv_sqrt(p.A) * np.exp(-quad / (2 * p.hbar))


def _recurrence_inputs(p, x):
    Ainv = np.linalg.inv(p.A)
    scaled = (2 / np.sqrt(p.hbar)) * (Ainv @ x.T)
    return scaled, Ainv @ p.A.conj()


def _raise_along(axes, targets, scaled, G, prev, curr):
    # p_{k'} computed from parent k' - e_j, with j given per target row
    rows = np.arange(len(targets))
    parents = targets.copy()
    parents[rows, axes] -= 1
    values = scaled[axes] * curr[mi.lex_ranks(parents)]
    d = targets.shape[1]
    for i in range(d):
        mask = parents[:, i] > 0
        if not mask.any():
            continue
        grand = parents[mask].copy()
        grand[:, i] -= 1
        factor = G[axes[mask], i] * parents[mask, i]
        values[mask] -= 2 * factor[:, None] * prev[mi.lex_ranks(grand)]
    return values


def polynomial_recurrence_step(p, n, prev, curr, points, check=False, tol=DEFAULT_TOL):
    """Values of ``p_k`` for ``|k| = n + 1`` from those for ``n - 1`` and ``n``.

    ``prev`` and ``curr`` have shapes ``(L_{n-1}, N)`` and ``(L_n, N)``;
    ``prev`` is ignored for ``n = 0``.  Each target is raised from its parent
    along the first nonzero axis.  With ``check`` set, every other admissible
    parent is used as well and :class:`InconsistentTableError` is raised if
    the results disagree beyond ``tol`` relative to the table's max-norm.
    """
    d = p.dim
    x = _points(points, d)
    curr = np.asarray(curr, dtype=complex)
    if curr.shape[0] != mi.level_size(d, n):
        raise InconsistentTableError(f"order {n} table needs {mi.level_size(d, n)} rows")
    if n == 0:
        prev = np.zeros((0, x.shape[0]), dtype=complex)
    else:
        prev = np.asarray(prev, dtype=complex)
        if prev.shape[0] != mi.level_size(d, n - 1):
            raise InconsistentTableError(f"order {n - 1} table needs {mi.level_size(d, n - 1)} rows")
    scaled, G = _recurrence_inputs(p, x)
    targets = mi.lex_array(d, n + 1)
    first = np.argmax(targets > 0, axis=1)
    values = _raise_along(first, targets, scaled, G, prev, curr)
    if check:
        scale = max(np.abs(values).max(initial=0.0), 1.0)
        for j in range(d):
            mask = targets[:, j] > 0
            axes = np.full(mask.sum(), j)
            other = _raise_along(axes, targets[mask], scaled, G, prev, curr)
            gap = np.abs(other - values[mask]).max(initial=0.0)
            if gap > tol * scale:
                raise InconsistentTableError(
                    f"order {n + 1}: raising along axis {j + 1} differs by {gap:.3e}"
                )
    return values


def polynomial_table(p, points, max_order, check=False):
    """``[P_0, ..., P_max_order]`` with ``P_m[i]`` the values of ``p_{ℓ_m(i)}``."""
    x = _points(points, p.dim)
    tables = [np.ones((1, x.shape[0]), dtype=complex)]
    prev = None
    for n in range(max_order):
        nxt = polynomial_recurrence_step(p, n, prev, tables[-1], x, check=check)
        prev = tables[-1]
        tables.append(nxt)
    return tables


def _normalisation(d, m):
    return np.array(
        [np.sqrt(2.0**m) * mi.sqrt_factorial(k) for k in mi.lex_enumerate(d, m)]
    )


@dataclass(frozen=True)
class WavePacketBundle:
    """All packets ``φ_k[A, B]`` with ``|k| = order``, in canonical label order."""

    params: ParamPair
    order: int

    @property
    def labels(self):
        return mi.lex_enumerate(self.params.dim, self.order)

    def evaluate(self, points):
        """Array of shape ``(L_n, N)``."""
        return self.evaluate_all(points)[-1]

    def evaluate_all(self, points):
        """Packet values for every order ``0..order``; one ``(L_m, N)`` array each."""
        d = self.params.dim
        ground = gaussian_eval(self.params, points)
        tables = polynomial_table(self.params, points, self.order)
        return [t * ground / _normalisation(d, m)[:, None] for m, t in enumerate(tables)]


def wavepacket_eval(bundle, k, points):
    """Values of ``φ_k`` for ``|k| <= bundle.order``."""
    k = tuple(int(v) for v in k)
    m = sum(k)
    if m > bundle.order:
        raise ValueError(f"|k| = {m} exceeds bundle order {bundle.order}")
    d = bundle.params.dim
    return bundle.evaluate_all(points)[m][mi.lex_rank(d, m, k) - 1]


def quadrature_rule(p, nodes=40):
    """Tensor Gauss-Hermite rule adapted to the width of ``|φ_0|^2``.

    Returns ``(points, weights)`` with ``Σ w f(x) ≈ ∫ f``.  The substitution
    ``x = sqrt(ħ) L y`` with ``L L^T = A A^*`` turns ``|φ_0|^2`` into a
    multiple of ``exp(-|y|^2)``, so products ``conj(φ_k) φ_l`` are integrated
    exactly up to rounding while ``|k| + |l| < 2 * nodes``.
    """
    d = p.dim
    t, w = np.polynomial.hermite.hermgauss(nodes)
    grids = np.meshgrid(*([t] * d), indexing="ij")
    y = np.stack([g.reshape(-1) for g in grids], axis=1)
    wgrid = np.meshgrid(*([w] * d), indexing="ij")
    weights = np.prod(np.stack([g.reshape(-1) for g in wgrid], axis=1), axis=1)
    evals, V = np.linalg.eigh((p.A @ p.A.conj().T).real)
    L = (V * np.sqrt(evals)) @ V.T
    points = np.sqrt(p.hbar) * y @ L.T
    weights = weights * np.exp(np.sum(y**2, axis=1)) * p.hbar ** (d / 2) * abs(np.linalg.det(L))
    return points, weights


def gram_matrix(p, max_order, nodes=40):
    """Quadrature Gram matrix of all packets with ``|k| <= max_order``.

    Rows and columns run over orders ``0..max_order``, each in label order.
    """
    points, weights = quadrature_rule(p, nodes)
    values = np.concatenate(WavePacketBundle(p, max_order).evaluate_all(points), axis=0)
    return (values.conj() * weights) @ values.T


@dataclass(frozen=True)
class RealignmentPlan:
    """Unitary ``U`` making ``A U`` real, with the factors it was built from.

    ``A = V diag(sigma) W^*`` with ``V`` real orthogonal.
    """

    mode: str
    U: np.ndarray
    A_new: np.ndarray
    B_new: np.ndarray
    phase: complex
    V: np.ndarray
    sigma: np.ndarray
    W: np.ndarray
    hbar: float = 1.0

    @property
    def params(self):
        return ParamPair(self.A_new, self.B_new, self.hbar)


def plan_realignment(p, mode="polar"):
    """Realign ``A`` to a real matrix by a unitary right factor.

    ``V`` and ``sigma`` come from the real symmetric eigenproblem of ``A A^*``
    (sorted descending, each column of ``V`` signed so its largest entry is
    positive); ``W = A^* V diag(sigma)^-1``.  ``mode="polar"`` gives
    ``U = W V^T`` and ``A U = V diag(sigma) V^T``; ``mode="svd"`` gives
    ``U = W`` and ``A U = V diag(sigma)``.
    """
    evals, V = np.linalg.eigh((p.A @ p.A.conj().T).real)
    order = np.argsort(evals)[::-1]
    evals, V = evals[order], V[:, order]
    pivots = np.argmax(np.abs(V), axis=0)
    V = V * np.sign(V[pivots, np.arange(V.shape[1])])
    sigma = np.sqrt(evals)
    W = (p.A.conj().T @ V) / sigma
    if mode == "polar":
        U = W @ V.T
    elif mode == "svd":
        U = W
    else:
        raise ValueError(f"unknown realignment mode {mode!r}")
    return RealignmentPlan(
        mode=mode,
        U=U,
        A_new=p.A @ U,
        B_new=p.B @ U,
        phase=det_inv_sqrt(U),
        V=V,
        sigma=sigma,
        W=W,
        hbar=p.hbar,
    )


@dataclass(frozen=True)
class Transformation:
    """Maps old packets of one order to the packets of ``(A U, B U)``.

    ``sign * (matrix @ old) == new`` holds pointwise, where ``sign`` absorbs
    the principal-branch mismatch of the square roots.
    """

    matrix: np.ndarray
    params: ParamPair
    phase: complex
    sign: int


def transform_bundle(bundle, U, tol=1e-12):
    """Transformation from ``bundle`` to the packets of ``(A U, B U)``.

    The matrix is ``det(U)^(-1/2) S_n(U^*)``: the raising operators of the new
    pair are ``U^*`` times the old ones, so the rows entering the symmetric
    Kronecker product are the rows of ``U^*``.
    """
    U = np.asarray(U, dtype=complex)
    d = bundle.params.dim
    if U.shape != (d, d):
        raise ShapeError(f"U has shape {U.shape}, expected {(d, d)}")
    residual = np.linalg.norm(U.conj().T @ U - np.eye(d))
    if residual > tol:
        raise NotUnitaryError(f"U is not unitary: ‖U*U - Id‖_F = {residual:.3e}")
    phase = det_inv_sqrt(U)
    matrix = phase * materialize(U.conj().T, bundle.order)
    return Transformation(
        matrix=matrix,
        params=bundle.params.right_multiply(U),
        phase=phase,
        sign=branch_sign(bundle.params.A, U),
    )
