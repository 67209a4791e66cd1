import numpy as np
import pytest

from qmetric import (AmplifiedElement, LipschitzTriple, OperatorSystem,
                     ParityMismatch, check_product_inequality, check_square_law,
                     external_product, forget_subdivisions,
                     product_seminorm_factorization, stabilize)
from qmetric.linalg import SIGMA_1, SIGMA_3, NotHermitian
from conftest import matrix_units


def even_triple():
    diag = OperatorSystem([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    return LipschitzTriple(diag, SIGMA_1, SIGMA_3)


def odd_triple():
    return LipschitzTriple(OperatorSystem(matrix_units(2)), SIGMA_3)


class TestLipschitzTriple:
    def test_requires_hermitian_dirac(self, m2):
        with pytest.raises(NotHermitian):
            LipschitzTriple(m2, np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_grading_validation(self, m2):
        # grading fails to commute with the full matrix algebra
        with pytest.raises(ParityMismatch):
            LipschitzTriple(m2, SIGMA_1, SIGMA_3)

    def test_parity_flag_consistency(self, m2):
        with pytest.raises(ParityMismatch):
            LipschitzTriple(m2, SIGMA_3, parity="even")

    def test_parities(self):
        assert even_triple().parity == "even"
        assert odd_triple().parity == "odd"


class TestStabilize:
    def test_identity(self):
        t = odd_triple()
        assert stabilize(t, 1) is t

    def test_scalar_matrices_in_kernel(self, rng):
        # L_{D^{(+) 2}} vanishes on M_2(C) (x) I
        t = stabilize(odd_triple(), 2)
        fam = t.family()
        v = rng.standard_normal((2, 2))
        # M_2(C) sits inside M_2(A) as v (x) I: never a spectral metric space
        z = t.system.from_matrix(1, np.kron(v, np.eye(2)))
        assert fam.eval(z) <= 1e-12

    def test_matches_base_family_after_forget(self, rng):
        t = odd_triple()
        st = stabilize(t, 2)
        base = t.family()
        for _ in range(20):
            z = st.system.random_element(rng, 2)
            assert st.family().eval(z) == pytest.approx(
                base.eval(forget_subdivisions(z)), abs=1e-12)

    def test_composes(self, rng):
        t = odd_triple()
        a = stabilize(stabilize(t, 2), 2)
        b = stabilize(t, 4)
        assert a.system.ambient_dim == b.system.ambient_dim
        assert np.allclose(np.sort(np.linalg.eigvalsh(a.dirac)),
                           np.sort(np.linalg.eigvalsh(b.dirac)))


class TestExternalProduct:
    def test_sigma_example_spectrum(self):
        p = external_product(even_triple(), even_triple())
        w = np.linalg.eigvalsh(p.result.dirac)
        assert np.allclose(np.sort(w), [-np.sqrt(2), -np.sqrt(2),
                                        np.sqrt(2), np.sqrt(2)], atol=1e-10)
        assert p.result.parity == "even"
        g = p.result.grading
        assert np.allclose(g, np.kron(SIGMA_3, SIGMA_3))

    def test_zero_second_factor_spectrum(self):
        diag = OperatorSystem([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
        t2 = LipschitzTriple(diag, np.zeros((2, 2)), SIGMA_3)
        for t1 in (even_triple(), odd_triple()):
            p = external_product(t1, t2)
            spec = np.sort(np.linalg.eigvalsh(p.result.dirac))
            expect = np.sort(np.repeat(np.linalg.eigvalsh(t1.dirac), 2))
            assert np.allclose(spec, expect, atol=1e-10)

    def test_odd_odd_scalar_example(self):
        one = LipschitzTriple(OperatorSystem([np.eye(1)]), np.eye(1))
        p = external_product(one, one)
        assert np.allclose(p.result.dirac, [[0, 1 + 1j], [1 - 1j, 0]])
        assert np.allclose(np.abs(np.linalg.eigvalsh(p.result.dirac)),
                           np.sqrt(2), atol=1e-12)

    def test_dimensions_and_gradings(self):
        cases = {("even", "even"): (4, True), ("even", "odd"): (4, False),
                 ("odd", "even"): (4, False), ("odd", "odd"): (8, True)}
        factories = {"even": even_triple, "odd": odd_triple}
        for (p1, p2), (dim, graded) in cases.items():
            p = external_product(factories[p1](), factories[p2]())
            assert p.result.hilbert_dim == dim
            assert (p.result.grading is not None) == graded

    def test_square_law(self):
        for t1 in (even_triple(), odd_triple()):
            for t2 in (even_triple(), odd_triple()):
                assert check_square_law(external_product(t1, t2)) <= 1e-10


class TestProductInequality:
    @pytest.mark.parametrize("s", [1, 2, 3])
    def test_all_parities(self, s):
        factories = (even_triple, odd_triple)
        for f1 in factories:
            for f2 in factories:
                p = external_product(f1(), f2())
                rep = check_product_inequality(p, s, 30, seed=5 + s)
                assert rep["violation"] <= 1e-9, rep
                assert rep["recovery_residual"] <= 1e-10, rep

    def test_scalar_element(self, rng):
        p = external_product(even_triple(), odd_triple())
        from qmetric import scalar_element
        z = scalar_element(p.tensor, rng.standard_normal((2, 2)))
        left, right, prod = product_seminorm_factorization(p, z)
        assert max(left, right, prod) <= 1e-12

    def test_x_tensor_unit(self, rng):
        p = external_product(odd_triple(), even_triple())
        X, Y = p.tensor.left, p.tensor.right
        cx = rng.standard_normal(X.dim) + 1j * rng.standard_normal(X.dim)
        c = np.einsum("k,l->kl", cx, Y.unit_coords).reshape(1, 1, p.tensor.dim)
        z = AmplifiedElement(p.tensor, 1, c)
        left, right, prod = product_seminorm_factorization(p, z)
        assert right <= 1e-12
        assert left <= prod + 1e-9

    def test_factorization_inequality(self, rng):
        for f1 in (even_triple, odd_triple):
            p = external_product(f1(), even_triple())
            for _ in range(10):
                z = p.tensor.random_element(rng, 2)
                left, right, prod = product_seminorm_factorization(p, z)
                assert left <= prod + 1e-9
                assert right <= prod + 1e-9
