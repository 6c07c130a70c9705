import numpy as np
import pytest

from symkron.errors import ShapeError, SizeCapError
from symkron.kron_oracle import iterated_kron_apply, kron, kron_power, symmetric_kron_dense
from symkron.sampling import make_rng, random_complex_matrix
from symkron.symspace import FullVec, SymVec, expand, is_symmetric

R2 = np.sqrt(2)


def test_kron_small():
    np.testing.assert_array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    M = np.array([[1, 2], [3, 4]])
    K = kron(M, M)
    np.testing.assert_array_equal(K[:2, :2], M)
    np.testing.assert_array_equal(K[2:, 2:], 4 * M)
    np.testing.assert_array_equal(K, np.kron(M, M))


def test_kron_rectangular_and_adjoint():
    rng = make_rng(1)
    A = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    B = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    np.testing.assert_allclose(kron(A, B), np.kron(A, B), rtol=0, atol=0)
    np.testing.assert_allclose(kron(A, B).conj().T, kron(A.conj().T, B.conj().T))


def test_mixed_product_and_multiplicativity():
    rng = make_rng(2)
    A, B, C, D = (random_complex_matrix(rng, 3) for _ in range(4))
    np.testing.assert_allclose(kron(A, B) @ kron(C, D), kron(A @ C, B @ D), atol=1e-13)
    np.testing.assert_allclose(kron_power(A @ B, 3), kron_power(A, 3) @ kron_power(B, 3), atol=1e-11)
    np.testing.assert_allclose(
        symmetric_kron_dense(A @ B, 3), symmetric_kron_dense(A, 3) @ symmetric_kron_dense(B, 3), atol=1e-11
    )


def test_kron_power_edge_orders():
    M = np.array([[1, 2], [3, 4]])
    np.testing.assert_array_equal(kron_power(M, 0), [[1]])
    np.testing.assert_array_equal(kron_power(M, 1), M)


def test_caps():
    with pytest.raises(SizeCapError):
        kron_power(np.eye(2), 13)
    with pytest.raises(SizeCapError):
        symmetric_kron_dense(np.eye(3), 10)
    with pytest.raises(ShapeError):
        kron_power(np.ones((2, 3)), 2)


def test_iterated_apply_methods_agree():
    rng = make_rng(3)
    M = random_complex_matrix(rng, 3)
    x = FullVec(3, 4, rng.standard_normal(81) + 1j * rng.standard_normal(81))
    a = iterated_kron_apply(M, 4, x, method="explicit").data
    b = iterated_kron_apply(M, 4, x, method="modes").data
    np.testing.assert_allclose(a, b, atol=1e-12)
    np.testing.assert_allclose(iterated_kron_apply(M, 1, FullVec(3, 1, x.data[:3])).data, M @ x.data[:3])
    np.testing.assert_allclose(iterated_kron_apply(np.eye(3), 4, x).data, x.data)
    with pytest.raises(ShapeError):
        iterated_kron_apply(M, 3, x)


def test_kron_power_keeps_symmetric_subspace():
    rng = make_rng(4)
    M = random_complex_matrix(rng, 2)
    y = SymVec(2, 3, rng.standard_normal(4) + 1j * rng.standard_normal(4))
    assert is_symmetric(iterated_kron_apply(M, 3, expand(y)), tol=1e-12)


def test_S1_and_identity():
    rng = make_rng(5)
    M = random_complex_matrix(rng, 3)
    np.testing.assert_allclose(symmetric_kron_dense(M, 1), M, atol=1e-15)
    for n in range(5):
        S = symmetric_kron_dense(np.eye(3), n)
        np.testing.assert_allclose(S, np.eye(S.shape[0]), atol=1e-15)


def test_S2_closed_form():
    a, b, c, d = 1.5 - 1j, 2.0, -0.25j, 4.0 + 0.5j
    expected = np.array(
        [
            [a * a, R2 * a * b, b * b],
            [R2 * a * c, a * d + b * c, R2 * b * d],
            [c * c, R2 * c * d, d * d],
        ]
    )
    np.testing.assert_allclose(symmetric_kron_dense(np.array([[a, b], [c, d]]), 2), expected, atol=1e-14)


def test_S3_frozen_integer_case():
    # computed once with this oracle; S_3 = diag(s)^-1 K diag(s), s = (1, √3, √3, 1)
    K = np.array([[1, 2, 4, 8], [9, 16, 28, 48], [27, 42, 64, 96], [27, 36, 48, 64]], dtype=float)
    s = np.array([1, np.sqrt(3), np.sqrt(3), 1])
    S = symmetric_kron_dense(np.array([[1, 2], [3, 4]]), 3)
    np.testing.assert_allclose(S, K * s[None, :] / s[:, None], rtol=1e-14)
