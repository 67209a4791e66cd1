"""State-space metrics, diameter constants, approximation certification.

All optimization problems here maximize a ratio of (maxima of) operator
norms over a real coefficient space; the heavy lifting is in
:mod:`qmetric.solvers`.  Every reported value is a certified lower bound
(attained at the reported argmax) unless the brute-force oracle upgraded
the certificate to exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import solvers
from .config import TOL
from .errors import EmptySpace, HypothesisFailed, QmetricError
from .linalg import Array, as_complex, operator_norm
from .opsys import (AmplifiedElement, OperatorSystem, TensorSystem, UcpMap,
                    quotient_norm, scalar_element)
from .seminorms import (LinearSeminorm, MaxSeminorm, SeminormFamily,
                        metric_family, tensor_lift)
from .solvers import SolverReport


def linear_branches(family: SeminormFamily):
    """Branch list when the family is a (max of) linear seminorm(s), else None."""
    if isinstance(family, LinearSeminorm):
        return family.branches
    if isinstance(family, MaxSeminorm):
        left = linear_branches(family.left)
        right = linear_branches(family.right)
        if left is not None and right is not None:
            return left + right
    return None


# ---------------------------------------------------------------------------
# Monge-Kantorovich distances


@dataclass(eq=False)
class MkProblem:
    """sup ||phi(x) - psi(x)|| over the L_1 unit ball of the system."""

    family: SeminormFamily
    system: OperatorSystem
    phi: UcpMap
    psi: UcpMap

    def __post_init__(self):
        if self.phi.target_dim != self.psi.target_dim:
            raise QmetricError("states must have equal target dimension")


def mk_distance(problem: MkProblem, seed: int = 0, restarts: int = 8,
                iterations: int = 500, oracle: bool = False) -> SolverReport:
    """Monge-Kantorovich distance between two (matrix) states.

    The supremum is taken over Hermitian x (the seminorm is *-invariant, so
    this does not change the value), parametrized over the kernel
    complement of L_1.  If the kernel of L_1 is not annihilated by
    phi - psi the distance is infinite: the report carries the witness
    ratio and infinite=True.
    """
    branches = linear_branches(problem.family)
    if branches is None:
        raise QmetricError("mk_distance needs a family with linear branches")
    H = problem.system.hermitian_coeff_basis()  # (m, r)
    r = H.shape[1]
    den = [np.einsum("kt,kab->tab", H, br) for br in branches]
    diff = np.stack([problem.phi.apply(H[:, t]) - problem.psi.apply(H[:, t])
                     for t in range(r)])
    num = [diff]

    comp, kern = solvers.kernel_split(den, r)
    for i in range(kern.shape[1]):
        k = kern[:, i]
        nb = operator_norm(np.tensordot(k, diff, axes=(0, 0)))
        if nb > TOL.rank_cutoff:
            dv = solvers.branch_value(den, k)
            ratio = nb / (dv + 1e-14)
            if ratio > TOL.infinite_ratio:
                return SolverReport(float(ratio), "lower_bound", 0, 0, seed,
                                    infinite=True, argmax=k)
    if comp.shape[1] == 0:
        return SolverReport(0.0, "exact", 0, 0, seed)

    num_p = [np.einsum("tq,tab->qab", comp, br) for br in num]
    den_p = [np.einsum("tq,tab->qab", comp, br) for br in den]
    report = solvers.maximize_ratio(num_p, den_p, seed, restarts, iterations)
    if oracle and comp.shape[1] <= 6:
        grid = solvers.grid_max_ratio(num_p, den_p)
        if grid.value >= report.value:
            report = grid
        report.certificate = "exact"
    report.seed = seed
    return report


# ---------------------------------------------------------------------------
# finite metric spaces


class FiniteMetricSpace:
    """Finite metric space; functions realized as diagonal matrices."""

    def __init__(self, dist):
        dist = np.asarray(dist, dtype=float)
        n = dist.shape[0]
        if n == 0:
            raise EmptySpace("metric space has no points")
        if dist.shape != (n, n) or not np.allclose(dist, dist.T, atol=1e-12) \
                or np.any(np.abs(np.diag(dist)) > 1e-12):
            raise QmetricError("invalid distance matrix")
        for i in range(n):
            for j in range(n):
                if i != j and dist[i, j] <= 0:
                    raise QmetricError("off-diagonal distances must be positive")
                for k in range(n):
                    if dist[i, j] > dist[i, k] + dist[k, j] + 1e-12:
                        raise QmetricError("triangle inequality fails")
        self.dist = dist
        self.n = n
        diag = []
        for p in range(n):
            e = np.zeros((n, n), dtype=np.complex128)
            e[p, p] = 1.0
            diag.append(e)
        self.system = OperatorSystem(diag, check=False)

    def family(self) -> LinearSeminorm:
        return metric_family(self.system, self.dist)

    def dirac_state(self, p: int) -> UcpMap:
        values = [np.array([[1.0 + 0j if k == p else 0.0]]) for k in range(self.n)]
        return UcpMap(self.system, 1, values, f"dirac-{p}")

    def diameter(self) -> float:
        return float(self.dist.max())


# ---------------------------------------------------------------------------
# approximation pairs and their defects


@dataclass(eq=False)
class ApproxPair:
    """(iota, Phi): unital maps given by coordinate matrices on one system.

    iota is typically the identity inclusion; Phi has finite-dimensional
    image.  `eps_analytic` is an upper bound on the defect known from the
    construction; `cb_bound` bounds the (complete) norm of Phi.
    """

    system: OperatorSystem
    iota: Array
    phi: Array
    flags: dict = field(default_factory=dict)
    eps_analytic: float | None = None
    cb_bound: float = 1.0
    label: str = "approx"

    def __post_init__(self):
        self.iota = as_complex(self.iota)
        self.phi = as_complex(self.phi)
        u = self.system.unit_coords
        for name, mat in (("iota", self.iota), ("phi", self.phi)):
            if np.linalg.norm(mat @ u - u) > TOL.hermiticity * 10 * (1 + np.linalg.norm(u)):
                raise QmetricError(f"{name} is not unital")

    @property
    def image_rank(self) -> int:
        sv = np.linalg.svd(self.phi, compute_uv=False)
        return int(np.sum(sv > TOL.rank_cutoff * max(1.0, sv[0])))

    def difference_family(self) -> LinearSeminorm:
        """Entrywise linear family z |-> ||(iota - Phi)_s(z)||."""
        delta = self.iota - self.phi
        bstack = self.system._bstack
        br = np.einsum("lk,lab->kab", delta, bstack)
        return LinearSeminorm("difference", self.system, [br])

    def apply_phi(self, z: AmplifiedElement) -> AmplifiedElement:
        c = np.einsum("ijk,lk->ijl", z.coeffs, self.phi)
        return AmplifiedElement(self.system, z.level, c)


def identity_pair(system: OperatorSystem, label: str = "identity") -> ApproxPair:
    eye = np.eye(system.dim)
    return ApproxPair(system, eye, eye, {"positive": True, "isometric": True,
                                         "completely_positive": True},
                      eps_analytic=0.0, label=label)


def _ratio_samples(numerator: SeminormFamily, denominator: SeminormFamily,
                   system: OperatorSystem, max_level: int, trials: int,
                   rng: np.random.Generator):
    best, best_z = 0.0, None
    for _ in range(trials):
        s = int(rng.integers(1, max_level + 1))
        z = system.random_element(rng, s, hermitian=bool(rng.integers(0, 2)))
        dv = denominator.eval(z)
        if dv < 1e-10:
            continue
        val = numerator.eval(z) / dv
        if val > best:
            best, best_z = val, z
    return best, best_z


def approximation_defect(pair: ApproxPair, family: SeminormFamily,
                         max_level: int, trials: int, seed: int,
                         restarts: int = 8, iterations: int = 500) -> SolverReport:
    """Smallest valid epsilon across levels: sup ||(iota - Phi)_s(x)|| / L_s(x).

    Sampled over random amplifications plus a level-1 supergradient ascent
    when the family has linear branches; certified lower bound.
    """
    rng = np.random.default_rng(seed)
    num_fam = pair.difference_family()
    best, _ = _ratio_samples(num_fam, family, pair.system, max_level, trials, rng)

    branches = linear_branches(family)
    if branches is not None:
        H = pair.system.hermitian_coeff_basis()
        den = [np.einsum("kt,kab->tab", H, br) for br in branches]
        num = [np.einsum("kt,kab->tab", H, br) for br in num_fam.branches]
        comp, _ = solvers.kernel_split(den, H.shape[1])
        if comp.shape[1]:
            num_p = [np.einsum("tq,tab->qab", comp, br) for br in num]
            den_p = [np.einsum("tq,tab->qab", comp, br) for br in den]
            rep = solvers.maximize_ratio(num_p, den_p, seed, restarts, iterations)
            best = max(best, rep.value)
    return SolverReport(float(best), "lower_bound", trials, 1, seed)


def finite_diameter_constant(family: SeminormFamily, max_level: int,
                             trials: int, seed: int) -> SolverReport:
    """Estimate of the best C with quotient-norm <= C L_s, sampled + polished."""
    rng = np.random.default_rng(seed)
    system = family.system
    best = 0.0
    best_c1 = None
    for _ in range(trials):
        s = int(rng.integers(1, max_level + 1))
        z = system.random_element(rng, s, hermitian=True)
        lv = family.eval(z)
        if lv < 1e-10:
            continue
        val = quotient_norm(z) / lv
        if val > best:
            best = val
            if s == 1:
                best_c1 = z.coeffs
    # Nelder-Mead polish at level 1 over Hermitian coordinates (closed-form
    # quotient norm there keeps the objective cheap and exact).
    H = system.hermitian_coeff_basis()
    r = H.shape[1]
    if r:
        if best_c1 is not None:
            x0, _, _, _ = np.linalg.lstsq(
                np.vstack([H.real, H.imag]),
                np.concatenate([best_c1.reshape(-1).real, best_c1.reshape(-1).imag]),
                rcond=None)
        else:
            x0 = np.random.default_rng(seed).standard_normal(r)

        def neg_ratio(c):
            z = AmplifiedElement(system, 1, (H @ c).reshape(1, 1, -1))
            lv = family.eval(z)
            if lv < 1e-10:
                return 0.0
            w = np.linalg.eigvalsh(z.realization)
            return -(w[-1] - w[0]) / 2.0 / lv

        res = optimize.minimize(neg_ratio, x0, method="Nelder-Mead",
                                options={"maxiter": 800, "fatol": 1e-12})
        best = max(best, -float(res.fun))
    return SolverReport(float(best), "lower_bound", trials, 1, seed)


# ---------------------------------------------------------------------------
# partition-of-unity approximations on finite metric spaces


def build_partition_approximation(space: FiniteMetricSpace, eps: float) -> ApproxPair:
    """Greedy eps-net centers with hat-function partition of unity.

    Phi(f)(p) = sum_j f(c_j) phi_j(p) with phi_j supported on the open
    eps-ball around center c_j; the defect against the Lipschitz seminorm
    is bounded by eps.
    """
    if eps <= 0:
        raise QmetricError("eps must be positive")
    centers = []
    for p in range(space.n):
        if all(space.dist[p, c] >= eps for c in centers):
            centers.append(p)
    hats = np.zeros((space.n, len(centers)))
    for p in range(space.n):
        for j, c in enumerate(centers):
            hats[p, j] = max(0.0, 1.0 - space.dist[p, c] / eps)
        hats[p] /= hats[p].sum()
    phi = np.zeros((space.n, space.n))
    for j, c in enumerate(centers):
        phi[:, c] = hats[:, j]
    return ApproxPair(space.system, np.eye(space.n), phi,
                      {"positive": True, "isometric": True},
                      eps_analytic=eps, label=f"partition-eps-{eps:g}")


def certify_finite_diameter_via_norm(pair: ApproxPair, family: SeminormFamily,
                                     aux_norm_bound: float, trials: int = 100,
                                     seed: int = 0) -> dict:
    """Finite-diameter certificate from an approximation pair.

    Hypothesis: the Frobenius-coefficient norm of [Phi(x)] modulo scalars is
    bounded by aux_norm_bound * L(x); E is the equivalence constant between
    that auxiliary norm and the quotient norm on Phi's image, estimated by
    Gram analysis of the image basis plus sampling.  The implied diameter
    constant is cb_bound * (eps + aux_norm_bound * E).
    """
    rng = np.random.default_rng(seed)
    system = pair.system
    unit = system.unit_coords
    proj_scalar = np.outer(unit, unit.conj()) / np.vdot(unit, unit)

    def aux_norm(coeffs1):
        return float(np.linalg.norm(coeffs1 - proj_scalar @ coeffs1))

    worst = 0.0
    witness = None
    E = 0.0
    for _ in range(trials):
        z = system.random_element(rng, 1, hermitian=True)
        lv = family.eval(z)
        y = pair.phi @ z.coeffs[0, 0]
        an = aux_norm(y)
        if lv > 1e-10 and an / lv > worst:
            worst = an / lv
            witness = z.coeffs
        if an > 1e-10:
            q = quotient_norm(AmplifiedElement(system, 1, y.reshape(1, 1, -1)))
            E = max(E, q / an)
    if worst > aux_norm_bound * (1 + 1e-9) + TOL.comparison:
        raise HypothesisFailed(
            f"aux-norm bound violated: ratio {worst:.6g} > {aux_norm_bound:.6g}",
            witness=witness)
    eps = pair.eps_analytic if pair.eps_analytic is not None else 0.0
    constant = pair.cb_bound * (eps + aux_norm_bound * E)
    return {"passed": True, "constant": constant, "equivalence_constant": E,
            "worst_ratio": worst}


def covering_diagnostic(family: SeminormFamily, eps: float, samples: int,
                        seed: int) -> int:
    """Greedy eps-net size of the sampled L-unit ball in the quotient norm."""
    rng = np.random.default_rng(seed)
    system = family.system
    net: list[Array] = []
    for _ in range(samples):
        z = system.random_element(rng, 1, hermitian=True)
        lv = family.eval(z)
        if lv < 1e-9:
            continue
        z = z * (1.0 / lv)
        _, v = solvers.nearest_scalar(z.realization, 1, system.ambient_dim)
        y = z.realization - np.kron(v, np.eye(system.ambient_dim))
        if all(operator_norm(y - w) > eps for w in net):
            net.append(y)
    return max(1, len(net))


# ---------------------------------------------------------------------------
# tensor-product certification


def slice_map(tsys: TensorSystem, psi: UcpMap, z: AmplifiedElement) -> AmplifiedElement:
    """(psi (x) 1)_s(z) as an element of M_s(X (x) Y), embedded via 1 (x) Y."""
    X, Y = tsys.left, tsys.right
    if psi.system is not X or psi.target_dim != 1:
        raise QmetricError("psi must be a state on the left factor")
    s = z.level
    scalars = np.array([psi.values[k][0, 0] for k in range(X.dim)])
    c = z.coeffs.reshape(s, s, X.dim, Y.dim)
    sliced = np.einsum("ijkl,k->ijl", c, scalars)
    out = np.einsum("ijl,k->ijkl", sliced, X.unit_coords)
    return AmplifiedElement(tsys, s, out.reshape(s, s, tsys.dim))


def tensor_factor_slice_bound(family: LinearSeminorm, C: float, psi: UcpMap,
                              tsys: TensorSystem, z: AmplifiedElement,
                              tol: float = TOL.comparison):
    """Check ||z - (psi (x) 1)_s(z)|| <= 2 C (L (x) 1)_s(z)."""
    left = (z - slice_map(tsys, psi, z)).norm()
    right = 2.0 * C * tensor_lift(family, tsys, "left").eval(z)
    return left <= right + tol, {"left": left, "right": right}


def tensor_pair(tsys: TensorSystem, pair_x: ApproxPair, pair_y: ApproxPair,
                eps: float | None = None) -> ApproxPair:
    """(iota_X (x) iota_Y, Phi_X (x) Phi_Y) on the tensor system."""
    return ApproxPair(tsys, np.kron(pair_x.iota, pair_y.iota),
                      np.kron(pair_x.phi, pair_y.phi),
                      {"completely_positive":
                       pair_x.flags.get("completely_positive", False)
                       and pair_y.flags.get("completely_positive", False)},
                      eps_analytic=eps, label=f"{pair_x.label}(x){pair_y.label}")


def tensor_product_certification(tsys: TensorSystem, m_family: SeminormFamily,
                                 left_family: SeminormFamily,
                                 right_family: SeminormFamily,
                                 pair_x: ApproxPair, pair_y: ApproxPair,
                                 eps_x: float, eps_y: float,
                                 c_left: float, c_right: float, D: float = 1.0,
                                 max_level: int = 2, trials: int = 60,
                                 seed: int = 0, tol: float = 1e-6) -> dict:
    """Certify the tensor system against the product-seminorm bounds.

    Spot-checks the domination hypothesis (L (x) 1)_s, (1 (x) K)_s <= D M_s,
    then measures the defect of the tensor approximation pair and the
    tensor diameter constant, asserting
        defect <= D eps_x + D eps_y + tol   and
        diameter <= 2 (c_left + c_right) D + tol.
    """
    rng = np.random.default_rng(seed)
    for _ in range(20):
        s = int(rng.integers(1, max_level + 1))
        z = tsys.random_element(rng, s)
        mv = m_family.eval(z)
        lv, kv = left_family.eval(z), right_family.eval(z)
        if max(lv, kv) > D * mv + TOL.comparison * (1 + mv):
            raise HypothesisFailed(
                f"factor seminorm exceeds D * M: {max(lv, kv):.6g} > {D * mv:.6g}",
                witness=z.coeffs)

    pair = tensor_pair(tsys, pair_x, pair_y, eps=D * (eps_x + eps_y))
    defect = approximation_defect(pair, m_family, max_level, trials, seed,
                                  restarts=4, iterations=150)
    diameter = finite_diameter_constant(m_family, max_level, trials, seed + 1)
    defect_bound = D * eps_x + D * eps_y
    diameter_bound = 2.0 * (c_left + c_right) * D
    return {
        "defect": defect.value,
        "defect_bound": defect_bound,
        "defect_ok": defect.value <= defect_bound + tol,
        "diameter": diameter.value,
        "diameter_bound": diameter_bound,
        "diameter_ok": diameter.value <= diameter_bound + tol,
    }
