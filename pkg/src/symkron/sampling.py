"""Seeded random inputs for property checks.

All randomness goes through :func:`make_rng`, a NumPy ``Generator`` driven by
the PCG64 bit generator, so a seed reproduces the same matrices on every
platform.
"""

import numpy as np

from .hagedorn import ParamPair, harmonic_flow

__all__ = [
    "make_rng",
    "random_complex_matrix",
    "random_unitary",
    "random_orthogonal",
    "random_conditioned_matrix",
    "random_valid_params",
]


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def random_complex_matrix(rng, d):
    """Entries i.i.d. standard complex Gaussian (unit variance)."""
    return (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)


def random_unitary(rng, d):
    """Haar distributed unitary from the QR factorisation of a Gaussian matrix."""
    Q, R = np.linalg.qr(random_complex_matrix(rng, d))
    phases = np.diag(R) / np.abs(np.diag(R))
    return Q * phases


def random_orthogonal(rng, d):
    Q, R = np.linalg.qr(rng.standard_normal((d, d)))
    return Q * np.sign(np.diag(R))


def random_conditioned_matrix(rng, d, spread=0.5):
    """``U diag(s) V`` with Haar unitaries and ``log s`` uniform on ``[-spread, spread]``.

    The condition number is at most ``exp(2 * spread)``.
    """
    s = np.exp(rng.uniform(-spread, spread, size=d))
    return (random_unitary(rng, d) * s) @ random_unitary(rng, d)


def random_valid_params(rng, d, hbar=1.0, real=False):
    """A random pair satisfying both compatibility conditions.

    Start from a real invertible ``A0`` and ``B0 = (inv(A0 A0^T) + iS) A0``
    with ``S`` real symmetric, which is valid by construction.  Unless
    ``real`` is set, push it through the harmonic flow for a random time and
    multiply on the right by a random unitary; both maps preserve validity.
    """
    A0 = (random_orthogonal(rng, d) * np.exp(rng.uniform(-0.5, 0.5, size=d))) @ random_orthogonal(rng, d)
    S = rng.standard_normal((d, d)) * 0.5
    S = S + S.T
    B0 = (np.linalg.inv(A0 @ A0.T) + 1j * S) @ A0
    if real:
        return ParamPair(A0.astype(complex), B0, hbar)
    A, B = harmonic_flow(A0, B0, rng.uniform(0.0, 2 * np.pi))
    U = random_unitary(rng, d)
    return ParamPair(A @ U, B @ U, hbar)
