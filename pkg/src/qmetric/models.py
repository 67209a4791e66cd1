"""Computable model instances.

Two families of examples drive the test suite:

* the fuzzy torus — M_q(C) with the ergodic Weyl action of Z_q x Z_q by
  clock and shift unitaries, with the torus length function restricted to
  the embedded root-of-unity subgroup; and
* trigonometric polynomials over the rational rotation algebra (theta =
  p/q) with the Clifford-Dirac seminorm evaluated through the matrix-valued
  symbol on a torus grid, with a certified Lipschitz error bound.

A small even spectral triple over the fuzzy torus (clock/shift position
operators against gamma matrices) supplies commutator families with scalar
kernel for the product and tensor-certification suites.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .errors import InvalidWeight, IrrationalTheta, QmetricError
from .linalg import Array, adjoint, as_complex, clifford_generators, frobenius, operator_norm
from .opsys import OperatorSystem
from .seminorms import LinearSeminorm, action_family
from .triples import LipschitzTriple


def clock_and_shift(q: int, p: int = 1) -> tuple[Array, Array, complex]:
    """Clock U = diag(omega^j), shift V with V U = omega U V, omega = e^{2 pi i p/q}."""
    omega = np.exp(2j * np.pi * p / q)
    U = np.diag(omega ** np.arange(q))
    V = np.zeros((q, q), dtype=np.complex128)
    for j in range(q):
        V[(j - 1) % q, j] = 1.0  # V e_j = e_{j-1}
    return U, V, omega


def _torus_representative(k: int, q: int) -> int:
    """Representative of k mod q in (-q/2, q/2]."""
    r = k % q
    return r - q if r > q / 2 else r


class GroupActionModel:
    """Ergodic Weyl action of Z_q x Z_q on M_q(C) with a torus length function."""

    def __init__(self, q: int, p: int = 1):
        self.q, self.p = q, p
        self.U, self.V, self.omega = clock_and_shift(q, p)
        self.group = [(m, n) for m in range(q) for n in range(q)]
        self._weyl = {}
        for m, n in self.group:
            self._weyl[(m, n)] = np.linalg.matrix_power(self.V, m) @ \
                np.linalg.matrix_power(self.U, n)
        self.system = OperatorSystem([self._weyl[g] for g in self.group], check=False)
        self.ergodic = gcd(p, q) == 1

    def weyl(self, g) -> Array:
        return self._weyl[(g[0] % self.q, g[1] % self.q)]

    def length(self, g) -> float:
        m = _torus_representative(g[0], self.q)
        n = _torus_representative(g[1], self.q)
        return 2 * np.pi / self.q * float(np.hypot(m, n))

    def act(self, g, a: Array) -> Array:
        W = self.weyl(g)
        return W @ as_complex(a) @ adjoint(W)

    def eta_ell(self) -> float:
        """Group average of the length function (the diameter bound of the action)."""
        return float(np.mean([self.length(g) for g in self.group]))

    def seminorm(self) -> LinearSeminorm:
        nonid = [g for g in self.group if g != (0, 0)]
        return action_family(self.system, [self.weyl(g) for g in nonid],
                             [self.length(g) for g in nonid])

    def character(self, gamma, g) -> complex:
        """Character (r, t) of Z_q x Z_q evaluated at g."""
        r, t = gamma
        return np.exp(2j * np.pi * (r * g[0] + t * g[1]) / self.q)

    def spectral_projection(self, gamma, a: Array) -> Array:
        out = np.zeros_like(as_complex(a))
        for g in self.group:
            out += np.conj(self.character(gamma, g)) * self.act(g, a)
        return out / len(self.group)

    def averaging_coordinate_matrix(self, weight) -> Array:
        """Coordinate matrix of Phi_psi(a) = (1/|G|) sum_g psi(g) alpha_g(a)."""
        w = np.array([weight[g] for g in self.group], dtype=float)
        if np.any(w < -1e-12):
            raise InvalidWeight("weight must be nonnegative")
        if abs(np.mean(w) - 1.0) > 1e-10:
            raise InvalidWeight("weight must have group mean 1")
        cols = []
        for b in self.system.basis:
            img = np.zeros_like(b)
            for g, wg in zip(self.group, w):
                img += wg * self.act(g, b)
            cols.append(self.system.coords(img / len(self.group)))
        return np.stack(cols, axis=1)

    def analytic_defect_bound(self, weight) -> float:
        """(1/|G|) sum_g psi(g) l(g): the smoothing defect bound of Phi_psi."""
        return float(np.mean([weight[g] * self.length(g) for g in self.group]))

    def fejer_weight(self, r: int) -> dict:
        """Squared Dirichlet-kernel weight of order r, normalized to mean 1.

        r = 0 is the uniform weight (Phi = group average E); for odd q the
        order r = (q-1)/2 reproduces |G| * delta_e, i.e. Phi = identity.
        """
        js = np.arange(-r, r + 1)
        def dirichlet(m):
            return np.abs(np.sum(np.exp(2j * np.pi * js * m / self.q)))
        w = {g: float(dirichlet(g[0]) ** 2 * dirichlet(g[1]) ** 2) for g in self.group}
        mean = np.mean(list(w.values()))
        return {g: v / mean for g, v in w.items()}

    def fejer_sequence(self) -> list[int]:
        return list(range(self.q // 2 + 1))


def fuzzy_dirac_triple(q: int, p: int = 1) -> LipschitzTriple:
    """Even spectral triple over M_q with scalar commutator kernel.

    H = C^q (x) C^2, algebra a |-> a (x) I_2 with the Weyl basis,
    D = X (x) g1 + (F X F*) (x) g2 for the position matrix
    X = diag(0..q-1) and the Fourier matrix F, grading I_q (x) g3.
    """
    g1, g2, g3 = clifford_generators(1)
    model = GroupActionModel(q, p)
    X = np.diag(np.arange(q, dtype=float))
    F = np.exp(2j * np.pi * np.outer(np.arange(q), np.arange(q)) / q) / np.sqrt(q)
    Xhat = F @ X @ adjoint(F)
    basis = [np.kron(b, np.eye(2)) for b in model.system.basis]
    system = OperatorSystem(basis, check=False)
    dirac = np.kron(X, g1) + np.kron(Xhat, g2)
    return LipschitzTriple(system, dirac, np.kron(np.eye(q), g3))


# ---------------------------------------------------------------------------
# rational noncommutative torus


class TorusAlgebra:
    """Trigonometric polynomials over the rotation algebra at theta = p/q.

    The C*-norm is evaluated through the matrix-valued symbol
    x(z) = sum_k c_k (x) z1^{k1} z2^{k2} V^{k1} U^{k2} as a grid supremum
    over the torus, certified by an explicit Lipschitz error bound.
    """

    def __init__(self, q: int, p: int = 1):
        if q < 1:
            raise IrrationalTheta("theta must be a rational p/q with q >= 1")
        self.q, self.p = q, p
        self.U, self.V, self.omega = clock_and_shift(q, p)
        self.gammas = clifford_generators(1)[:2]
        self._words = {}

    def word(self, k) -> Array:
        """Normal-ordered Weyl word V^{k1} U^{k2} (negative powers via inverses)."""
        if k not in self._words:
            self._words[k] = np.linalg.matrix_power(self.V, k[0] % self.q) @ \
                np.linalg.matrix_power(self.U, k[1] % self.q)
        return self._words[k]

    def random_polynomial(self, rng: np.random.Generator, s: int, degree: int,
                          scale: float = 1.0) -> "TorusPolynomial":
        coeffs = {}
        for k1 in range(-degree, degree + 1):
            for k2 in range(-degree, degree + 1):
                coeffs[(k1, k2)] = scale * (
                    rng.standard_normal((s, s)) + 1j * rng.standard_normal((s, s)))
        return TorusPolynomial(self, s, coeffs)

    def generator(self, j: int, s: int = 1) -> "TorusPolynomial":
        k = (1, 0) if j == 1 else (0, 1)
        return TorusPolynomial(self, s, {k: np.eye(s, dtype=np.complex128)})

    def symbol_supremum(self, coeffs: dict, grid: int) -> tuple[float, float]:
        """(grid max of ||f(z)||, certified Lipschitz error bound).

        f(t) = sum_k e^{i k.t} M_k; the true supremum over the torus lies in
        [grid max, grid max + error] with
        error = (2 pi / grid) * sqrt(2) * sum_k |k|_2 ||M_k||.
        """
        ks = list(coeffs.keys())
        if not ks:
            return 0.0, 0.0
        mats = np.stack([as_complex(coeffs[k]) for k in ks])
        kvec = np.array(ks, dtype=float)
        t = 2 * np.pi * np.arange(grid) / grid
        best = 0.0
        # phases (grid, grid, nk) evaluated row by row to bound memory
        for t1 in t:
            phase = np.exp(1j * (kvec[:, 0] * t1 + kvec[:, 1][None, :] * t[:, None]))
            pts = np.tensordot(phase, mats, axes=(1, 0))  # (grid, a, b)
            sv = np.linalg.svd(pts, compute_uv=False)
            best = max(best, float(sv[:, 0].max()))
        error = 2 * np.pi / grid * np.sqrt(2.0) * float(
            sum(np.hypot(*k) * operator_norm(coeffs[k]) for k in ks))
        return best, error


@dataclass(eq=False)
class TorusPolynomial:
    algebra: TorusAlgebra
    level: int
    coeffs: dict  # k = (k1, k2) -> (level, level) array

    def __post_init__(self):
        self.coeffs = {k: as_complex(c) for k, c in self.coeffs.items()
                       if np.any(as_complex(c))}

    def _binary(self, other, op):
        keys = set(self.coeffs) | set(other.coeffs)
        z = np.zeros((self.level, self.level), dtype=np.complex128)
        return TorusPolynomial(self.algebra, self.level, {
            k: op(self.coeffs.get(k, z), other.coeffs.get(k, z)) for k in keys})

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, scalar):
        return TorusPolynomial(self.algebra, self.level,
                               {k: scalar * c for k, c in self.coeffs.items()})

    __rmul__ = __mul__

    def adjoint(self) -> "TorusPolynomial":
        """Coefficient rule d_{-k} = omega^{-k1 k2} c_k^*, fixed so that the
        symbol of the adjoint is the pointwise adjoint of the symbol."""
        out = {}
        for (k1, k2), c in self.coeffs.items():
            out[(-k1, -k2)] = self.algebra.omega ** (-k1 * k2) * adjoint(c)
        return TorusPolynomial(self.algebra, self.level, out)

    def act(self, t1: float, t2: float) -> "TorusPolynomial":
        """Torus action: scale c_k by e^{i(k1 t1 + k2 t2)}."""
        return TorusPolynomial(self.algebra, self.level, {
            k: np.exp(1j * (k[0] * t1 + k[1] * t2)) * c
            for k, c in self.coeffs.items()})

    def partial(self, j: int) -> "TorusPolynomial":
        """Derivation: scale c_k by i k_j."""
        return TorusPolynomial(self.algebra, self.level,
                               {k: 1j * k[j - 1] * c for k, c in self.coeffs.items()})

    def _symbol_coeffs(self, with_word=None) -> dict:
        alg = self.algebra
        out = {}
        for k, c in self.coeffs.items():
            w = alg.word(k) if with_word is None else with_word(k)
            out[k] = np.kron(c, w)
        return out

    def norm(self, grid: int = 64) -> tuple[float, float]:
        """(grid value, certified error) of the C*-norm via the symbol."""
        return self.algebra.symbol_supremum(self._symbol_coeffs(), grid)

    def dirac_seminorm(self, grid: int = 64) -> tuple[float, float]:
        """L_s(x) = || sum_j partial_j(x) (x) gamma_j ||, via the symbol.

        The symbol coefficient of k is c_k (x) V^{k1}U^{k2} (x)
        i (k1 g1 + k2 g2).
        """
        alg = self.algebra
        g1, g2 = alg.gammas
        out = {}
        for k, c in self.coeffs.items():
            cliff = 1j * (k[0] * g1 + k[1] * g2)
            if not np.any(cliff):
                continue
            out[k] = np.kron(np.kron(c, alg.word(k)), cliff)
        return alg.symbol_supremum(out, grid)

    def partial_norm(self, j: int, grid: int = 64) -> tuple[float, float]:
        return self.partial(j).norm(grid)


def torus_length(t1: float, t2: float) -> float:
    """Length of a torus point, representatives in (-pi, pi]."""
    def wrap(t):
        r = np.mod(t, 2 * np.pi)
        return r - 2 * np.pi if r > np.pi else r
    return float(np.hypot(wrap(t1), wrap(t2)))


def check_action_vs_dirac(alg: TorusAlgebra, s: int, trials: int, seed: int,
                          degree: int = 3, grid: int = 64) -> dict:
    """Smoothness inequalities of the torus model on random polynomials.

    Asserts (one-sidedly, so grid truncation can only make the check
    stricter on the left and is compensated by the certified error on the
    right):
      ||alpha_t(x) - x|| <= sqrt(2) l(t) (L(x) + err)  and
      ||partial_j(x)||   <=           L(x) + err.
    """
    rng = np.random.default_rng(seed)
    action_violation = partial_violation = 0.0
    for _ in range(trials):
        x = alg.random_polynomial(rng, s, degree)
        lip, lip_err = x.dirac_seminorm(grid)
        t1, t2 = rng.uniform(-np.pi, np.pi, size=2)
        diff, _ = (x.act(t1, t2) - x).norm(grid)
        bound = np.sqrt(2.0) * torus_length(t1, t2) * (lip + lip_err)
        action_violation = max(action_violation, diff - bound)
        for j in (1, 2):
            pn, _ = x.partial_norm(j, grid)
            partial_violation = max(partial_violation, pn - (lip + lip_err))
    return {"action_violation": max(0.0, action_violation),
            "partial_violation": max(0.0, partial_violation),
            "trials": trials, "level": s}
