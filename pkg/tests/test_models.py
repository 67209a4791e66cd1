import numpy as np
import pytest

from qmetric import (GroupActionModel, InvalidWeight, IrrationalTheta,
                     TorusAlgebra, check_action_vs_dirac, fuzzy_dirac_triple)
from qmetric.models import clock_and_shift, torus_length

ERGODIC_CASES = [(2, 1), (3, 1), (3, 2), (4, 1), (4, 3), (5, 1), (5, 2)]


class TestClockAndShift:
    @pytest.mark.parametrize("q,p", ERGODIC_CASES)
    def test_weyl_relation(self, q, p):
        U, V, omega = clock_and_shift(q, p)
        assert np.allclose(V @ U, omega * U @ V, atol=1e-12)
        assert np.allclose(np.linalg.matrix_power(U, q), np.eye(q), atol=1e-10)
        assert np.allclose(np.linalg.matrix_power(V, q), np.eye(q), atol=1e-10)

    def test_shift_direction(self):
        _, V, _ = clock_and_shift(3)
        e1 = np.eye(3)[:, 1]
        assert np.allclose(V @ e1, np.eye(3)[:, 0])


class TestGroupActionModel:
    @pytest.mark.parametrize("q,p", ERGODIC_CASES)
    def test_action_is_a_group_action(self, q, p):
        m = GroupActionModel(q, p)
        rng = np.random.default_rng(q * 10 + p)
        a = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
        for g in [(1, 0), (0, 1), (1, 2), (q - 1, q - 1)]:
            for h in [(0, 0), (1, 1), (2, q - 1)]:
                gh = ((g[0] + h[0]) % q, (g[1] + h[1]) % q)
                assert np.allclose(m.act(g, m.act(h, a)), m.act(gh, a),
                                   atol=1e-10)

    @pytest.mark.parametrize("q", [2, 3, 4, 5])
    def test_length_axioms_exhaustive(self, q):
        m = GroupActionModel(q)
        for g in m.group:
            lg = m.length(g)
            assert (lg == 0.0) == (g == (0, 0))
            assert m.length(((-g[0]) % q, (-g[1]) % q)) == pytest.approx(lg)
            for h in m.group:
                gh = ((g[0] + h[0]) % q, (g[1] + h[1]) % q)
                assert m.length(gh) <= lg + m.length(h) + 1e-12

    def test_ergodicity_flag(self):
        assert GroupActionModel(5, 2).ergodic
        assert not GroupActionModel(4, 2).ergodic

    @pytest.mark.parametrize("q,p", ERGODIC_CASES)
    def test_ergodic_fixed_points_are_scalar(self, q, p):
        # a commutes with the whole action iff it is scalar
        m = GroupActionModel(q, p)
        rng = np.random.default_rng(3)
        a = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
        avg = sum(m.act(g, a) for g in m.group) / len(m.group)
        assert np.allclose(avg, np.trace(a) / q * np.eye(q), atol=1e-10)

    def test_seminorm_positive_on_generators(self):
        m = GroupActionModel(3)
        for g in [(1, 0), (0, 1), (1, 1)]:
            c = m.system.coords(m.weyl(g)).reshape(1, 1, -1)
            from qmetric import AmplifiedElement
            assert m.seminorm().eval(
                AmplifiedElement(m.system, 1, c)) > 0.1

    def test_eta_is_mean_length(self):
        m = GroupActionModel(3)
        assert m.eta_ell() == pytest.approx(
            sum(m.length(g) for g in m.group) / 9)


class TestSpectralProjections:
    @pytest.mark.parametrize("q,p", [(2, 1), (3, 1), (3, 2), (5, 1)])
    def test_resolution_of_identity(self, q, p):
        m = GroupActionModel(q, p)
        rng = np.random.default_rng(7)
        a = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
        total = sum(m.spectral_projection(gamma, a) for gamma in m.group)
        assert np.allclose(total, a, atol=1e-9)

    def test_idempotent(self):
        m = GroupActionModel(3)
        rng = np.random.default_rng(8)
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        for gamma in m.group:
            once = m.spectral_projection(gamma, a)
            twice = m.spectral_projection(gamma, once)
            assert np.allclose(once, twice, atol=1e-10)

    def test_monomial_selection(self):
        # each Weyl word is an eigenvector: exactly one character keeps it
        m = GroupActionModel(3)
        for g in m.group:
            W = m.weyl(g)
            hits = [gamma for gamma in m.group
                    if np.linalg.norm(m.spectral_projection(gamma, W)) > 1e-9]
            assert len(hits) == 1
            assert np.allclose(m.spectral_projection(hits[0], W), W, atol=1e-10)

    def test_trivial_character_is_expectation(self):
        m = GroupActionModel(4)
        rng = np.random.default_rng(9)
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        assert np.allclose(m.spectral_projection((0, 0), a),
                           np.trace(a) / 4 * np.eye(4), atol=1e-10)


class TestAveraging:
    def test_uniform_weight_is_expectation(self):
        m = GroupActionModel(3)
        phi = m.averaging_coordinate_matrix({g: 1.0 for g in m.group})
        # E kills every nontrivial Weyl word and fixes the identity
        expect = np.zeros((9, 9))
        expect[0, 0] = 1.0
        assert np.allclose(phi, expect, atol=1e-10)

    def test_invalid_weights(self):
        m = GroupActionModel(2)
        bad_sign = {g: 1.0 for g in m.group}
        bad_sign[(1, 1)] = -0.5
        with pytest.raises(InvalidWeight):
            m.averaging_coordinate_matrix(bad_sign)
        with pytest.raises(InvalidWeight):
            m.averaging_coordinate_matrix({g: 2.0 for g in m.group})

    def test_uniform_defect_bound_is_eta(self):
        m = GroupActionModel(4)
        assert m.analytic_defect_bound({g: 1.0 for g in m.group}) == \
            pytest.approx(m.eta_ell())

    def test_fejer_zero_is_uniform(self):
        m = GroupActionModel(5)
        w = m.fejer_weight(0)
        assert all(v == pytest.approx(1.0) for v in w.values())

    @pytest.mark.parametrize("q", [3, 5])
    def test_fejer_top_order_is_identity(self, q):
        m = GroupActionModel(q)
        w = m.fejer_weight((q - 1) // 2)
        phi = m.averaging_coordinate_matrix(w)
        assert np.allclose(phi, np.eye(q * q), atol=1e-9)
        assert m.fejer_sequence() == list(range(q // 2 + 1))

    def test_fejer_weights_valid(self):
        m = GroupActionModel(4)
        for r in m.fejer_sequence():
            w = m.fejer_weight(r)
            assert min(w.values()) >= -1e-12
            assert np.mean(list(w.values())) == pytest.approx(1.0)


class TestFuzzyDiracTriple:
    def test_even_with_scalar_kernel(self):
        t = fuzzy_dirac_triple(3)
        assert t.parity == "even"
        assert t.family().kernel_basis(1).shape[1] == 1

    def test_seminorm_positive_on_clock(self):
        from qmetric import AmplifiedElement
        t = fuzzy_dirac_triple(3)
        c = np.zeros(9, dtype=complex)
        c[1] = 1.0  # a nontrivial Weyl word
        z = AmplifiedElement(t.system, 1, c.reshape(1, 1, 9))
        assert t.family().eval(z) > 0.1


class TestTorusAlgebra:
    def test_rejects_bad_denominator(self):
        with pytest.raises(IrrationalTheta):
            TorusAlgebra(0)

    def test_generator_seminorm_is_one(self):
        # symbol of the Dirac commutator of U_1 has constant norm 1
        alg = TorusAlgebra(3)
        val, err = alg.generator(1).dirac_seminorm(grid=32)
        assert val == pytest.approx(1.0, abs=1e-9)
        val2, _ = alg.generator(2).dirac_seminorm(grid=32)
        assert val2 == pytest.approx(1.0, abs=1e-9)

    def test_sum_of_generators_seminorm(self):
        # frozen from the symbol-supremum oracle: the two Clifford directions
        # align at t1 = t2, giving exactly 2
        alg = TorusAlgebra(5)
        x = alg.generator(1) + alg.generator(2)
        val, err = x.dirac_seminorm(grid=256)
        assert abs(val - 2.0) <= err + 1e-9
        assert val == pytest.approx(2.0, abs=1e-3)

    def test_generator_norm_is_one(self):
        alg = TorusAlgebra(4)
        val, _ = alg.generator(1).norm(grid=16)
        assert val == pytest.approx(1.0, abs=1e-9)

    def test_adjoint_involution(self):
        alg = TorusAlgebra(3)
        rng = np.random.default_rng(5)
        x = alg.random_polynomial(rng, 2, 2)
        back = x.adjoint().adjoint()
        assert set(back.coeffs) == set(x.coeffs)
        for k in x.coeffs:
            assert np.allclose(back.coeffs[k], x.coeffs[k], atol=1e-12)

    def test_adjoint_preserves_norm(self):
        alg = TorusAlgebra(3, 2)
        rng = np.random.default_rng(6)
        for _ in range(5):
            x = alg.random_polynomial(rng, 2, 2)
            a, ea = x.norm(grid=48)
            b, eb = x.adjoint().norm(grid=48)
            assert abs(a - b) <= ea + eb + 1e-9

    def test_action_scalar_oracle(self):
        # || alpha_t(U_1) - U_1 || = |e^{i t1} - 1| exactly
        alg = TorusAlgebra(4)
        u1 = alg.generator(1)
        for t1 in (0.3, 1.2, np.pi / 2):
            val, err = (u1.act(t1, 0.7) - u1).norm(grid=64)
            oracle = abs(np.exp(1j * t1) - 1.0)
            assert abs(val - oracle) <= err + 1e-9
            assert oracle <= np.sqrt(2.0) * torus_length(t1, 0.7) + 1e-12

    def test_grid_refinement_monotone_and_certified(self):
        alg = TorusAlgebra(3)
        rng = np.random.default_rng(11)
        x = alg.random_polynomial(rng, 2, 3)
        vals = {}
        for grid in (16, 32, 64, 128):
            vals[grid] = x.norm(grid)
        for g in (16, 32, 64):
            v, e = vals[g]
            v2, _ = vals[2 * g]
            assert v <= v2 + 1e-12           # nested grids
            assert v2 <= v + e + 1e-12       # refinement within certificate

    def test_partial_of_constant_vanishes(self):
        alg = TorusAlgebra(3)
        from qmetric import TorusPolynomial
        one = TorusPolynomial(alg, 1, {(0, 0): np.eye(1)})
        assert one.partial(1).norm(16)[0] == 0.0
        assert one.dirac_seminorm(16)[0] == 0.0

    def test_torus_length_wrapping(self):
        assert torus_length(0.0, 0.0) == 0.0
        assert torus_length(2 * np.pi, 0.0) == pytest.approx(0.0, abs=1e-12)
        assert torus_length(np.pi + 0.1, 0.0) == pytest.approx(np.pi - 0.1)

    @pytest.mark.parametrize("q,p", [(2, 1), (3, 1), (5, 2)])
    def test_action_vs_dirac_no_violations(self, q, p):
        rep = check_action_vs_dirac(TorusAlgebra(q, p), s=1, trials=8,
                                    seed=q, degree=2, grid=48)
        assert rep["action_violation"] == 0.0
        assert rep["partial_violation"] == 0.0

    def test_action_vs_dirac_level_two(self):
        rep = check_action_vs_dirac(TorusAlgebra(3), s=2, trials=5, seed=1,
                                    degree=2, grid=48)
        assert rep["action_violation"] == 0.0
        assert rep["partial_violation"] == 0.0
