import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmetric import (DimensionMismatch, NotHermitian, clifford_generators,
                     commutator, direct_sum, hermitian_eigen, kron,
                     operator_norm)
from qmetric.linalg import adjoint, haar_isometry, random_complex, random_hermitian


def power_iteration_norm(m, steps=10_000, seed=0):
    """Independent oracle: sqrt of the top eigenvalue of M*M by power iteration."""
    a = adjoint(m) @ m
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(a.shape[0]) + 1j * rng.standard_normal(a.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(steps):
        w = a @ v
        lam = float(np.real(np.vdot(v, w)))
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        v = w / nw
    return np.sqrt(max(lam, 0.0))


class TestOperatorNorm:
    def test_identity(self):
        assert operator_norm(np.eye(5)) == pytest.approx(1.0)

    def test_diagonal(self):
        assert operator_norm(np.diag([3.0, -5.0])) == pytest.approx(5.0)

    def test_zero(self):
        assert operator_norm(np.zeros((3, 3))) == 0.0

    def test_matches_power_iteration(self):
        rng = np.random.default_rng(7)
        m = random_complex(rng, (6, 6))
        assert operator_norm(m) == pytest.approx(power_iteration_norm(m), abs=1e-9)

    def test_adjoint_invariance(self, rng):
        for _ in range(50):
            m = random_complex(rng, (4, 4))
            assert abs(operator_norm(m) - operator_norm(adjoint(m))) <= 1e-10


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_submultiplicative_and_cstar(seed):
    rng = np.random.default_rng(seed)
    a = random_complex(rng, (4, 4))
    b = random_complex(rng, (4, 4))
    assert operator_norm(a @ b) <= operator_norm(a) * operator_norm(b) + 1e-9
    assert operator_norm(adjoint(a) @ a) == pytest.approx(operator_norm(a) ** 2, abs=1e-9)


class TestHermitianEigen:
    def test_diagonal(self):
        res = hermitian_eigen(np.diag([1.0, 2.0, 3.0]))
        assert np.allclose(res.eigenvalues, [1, 2, 3])
        assert np.allclose(np.abs(res.eigenvectors), np.eye(3))

    def test_pauli_x(self):
        res = hermitian_eigen(np.array([[0, 1], [1, 0]]))
        assert np.allclose(res.eigenvalues, [-1, 1])

    def test_trace_identity(self, rng):
        m = random_hermitian(rng, 8)
        res = hermitian_eigen(m)
        assert res.eigenvalues.sum() == pytest.approx(np.real(np.trace(m)), abs=1e-9)

    def test_reconstruction_and_unitarity(self, rng):
        m = random_hermitian(rng, 6)
        res = hermitian_eigen(m)
        q, w = res.eigenvectors, res.eigenvalues
        assert np.linalg.norm(m - q @ np.diag(w) @ adjoint(q)) <= \
            1e-10 * (1 + np.linalg.norm(m))
        assert np.max(np.abs(adjoint(q) @ q - np.eye(6))) <= 1e-10

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            hermitian_eigen(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestCombinators:
    def test_kron_identity(self):
        assert np.allclose(kron(np.eye(2), np.eye(3)), np.eye(6))

    def test_kron_mixed_product(self, rng):
        a, b, c, d = (random_complex(rng, (3, 3)) for _ in range(4))
        assert np.allclose(kron(a, b) @ kron(c, d), kron(a @ c, b @ d))

    def test_commutator_identity(self, rng):
        d = random_hermitian(rng, 4)
        assert np.allclose(commutator(d, np.eye(4)), 0)

    def test_commutator_shape_check(self):
        with pytest.raises(DimensionMismatch):
            commutator(np.eye(2), np.eye(3))

    def test_direct_sum_norm(self, rng):
        for _ in range(20):
            a = random_complex(rng, (3, 3))
            b = random_complex(rng, (2, 2))
            assert operator_norm(direct_sum(a, b)) == pytest.approx(
                max(operator_norm(a), operator_norm(b)), abs=1e-10)


class TestClifford:
    def test_pauli_case(self):
        g = clifford_generators(1)
        assert len(g) == 3
        assert np.allclose(g[0], [[0, 1], [1, 0]])
        assert np.allclose(g[1], [[0, 1j], [-1j, 0]])
        assert np.allclose(g[2], [[1, 0], [0, -1]])

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_relations(self, m):
        g = clifford_generators(m)
        assert len(g) == 2 * m + 1
        dim = 2 ** m
        for i, gi in enumerate(g):
            assert np.max(np.abs(gi - adjoint(gi))) <= 1e-12
            assert abs(np.trace(gi)) <= 1e-12
            for j, gj in enumerate(g):
                anti = gi @ gj + gj @ gi
                expect = 2 * np.eye(dim) if i == j else np.zeros((dim, dim))
                assert np.max(np.abs(anti - expect)) <= 1e-12


def test_haar_isometry(rng):
    v = haar_isometry(rng, 5, 3)
    assert np.allclose(adjoint(v) @ v, np.eye(3), atol=1e-12)
    with pytest.raises(DimensionMismatch):
        haar_isometry(rng, 2, 3)
