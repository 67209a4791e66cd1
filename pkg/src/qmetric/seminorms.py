"""Operator seminorm families {L_s} and their verification.

Most families in the package are *linear* in a strong sense: there is a
finite list of linear maps delta_b on the operator system (the "branches"),
extended entrywise to amplifications, and

    L_s(z) = max_b || (delta_b)_s(z) ||.

Commutator seminorms (one branch [D, .]), finite-group action seminorms
(one branch per nonidentity group element), finite-metric Lipschitz
seminorms (one branch per point pair), stabilizations, and the exact tensor
lifts all share this shape; the kernel identity ker(L_s) = M_s(ker L_1)
then follows from the block structure and is checked numerically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TOL
from .errors import DimensionMismatch, UnsupportedKind
from .linalg import Array, as_complex, operator_norm
from .opsys import (AmplifiedElement, OperatorSystem, TensorSystem,
                    forget_subdivisions, scalar_element, ucp_ensemble,
                    apply_ucp_right)

LINEAR_KINDS = ("commutator", "action", "metric", "stabilized",
                "tensor-left", "tensor-right")


class SeminormFamily:
    """Base class: an evaluator z |-> L_{level(z)}(z)."""

    kind: str
    system: OperatorSystem

    def eval(self, z: AmplifiedElement) -> float:
        raise NotImplementedError

    def kernel_basis(self, s: int) -> Array:
        raise UnsupportedKind(f"kernel basis unavailable for kind {self.kind!r}")


class LinearSeminorm(SeminormFamily):
    """max-of-operator-norms of entrywise linear maps.

    branches : list of (m, a, b) arrays; branch b sends the k-th basis
    element to branches[b][k], extended entrywise to M_s.
    """

    def __init__(self, kind: str, system: OperatorSystem, branches):
        self.kind = kind
        self.system = system
        self.branches = [as_complex(br) for br in branches]
        for br in self.branches:
            if br.shape[0] != system.dim:
                raise DimensionMismatch("branch first axis must match system dimension")

    def eval(self, z: AmplifiedElement) -> float:
        if z.system is not self.system:
            raise DimensionMismatch("element belongs to a different operator system")
        s = z.level
        best = 0.0
        for br in self.branches:
            a, b = br.shape[1], br.shape[2]
            m = np.einsum("ijk,kab->iajb", z.coeffs, br).reshape(s * a, s * b)
            best = max(best, operator_norm(m))
        return best

    def level_matrix(self, s: int) -> Array:
        """Stacked matrix of the level-s defining map acting on vec(coeffs)."""
        m = self.system.dim
        blocks = []
        for br in self.branches:
            a, b = br.shape[1], br.shape[2]
            # output (s a, s b) as linear image of coeffs (s, s, m)
            op = np.zeros((s * a * s * b, s * s * m), dtype=np.complex128)
            for i in range(s):
                for j in range(s):
                    for k in range(m):
                        out = np.zeros((s, a, s, b), dtype=np.complex128)
                        out[i, :, j, :] = br[k]
                        op[:, (i * s + j) * m + k] = out.reshape(-1)
            blocks.append(op)
        return np.vstack(blocks)

    def kernel_basis(self, s: int) -> Array:
        """Columns = coefficient vectors (flattened (s,s,m)) spanning ker L_s."""
        if self.kind in ("tensor-left", "tensor-right"):
            raise UnsupportedKind("kernel basis for tensor kinds is sample-only")
        mat = self.level_matrix(s)
        _, sv, vh = np.linalg.svd(mat)
        sv = np.concatenate([sv, np.zeros(mat.shape[1] - len(sv))])
        scale = max(1.0, sv[0] if len(sv) else 1.0)
        return vh[sv <= TOL.rank_cutoff * scale].conj().T

    def hermitian_param_branches(self) -> list[Array]:
        """Branches re-expressed over the real Hermitian coefficient basis."""
        H = self.system.hermitian_coeff_basis()  # (m, r)
        return [np.einsum("kt,kab->tab", H, br) for br in self.branches]


def commutator_family(system: OperatorSystem, dirac: Array) -> LinearSeminorm:
    """L_s(z) = || [D^{(+) s}, z] ||; branch images [D, b_k]."""
    D = as_complex(dirac)
    br = np.stack([D @ b - b @ D for b in system.basis])
    return LinearSeminorm("commutator", system, [br])


def action_family(system: OperatorSystem, unitaries, lengths) -> LinearSeminorm:
    """L_s(z) = max_g ||(alpha_g)_s(z) - z|| / l(g), alpha_g = Ad(W_g).

    `unitaries` and `lengths` list the nonidentity group elements.
    """
    branches = []
    for W, ell in zip(unitaries, lengths):
        W = as_complex(W)
        br = np.stack([(W @ b @ W.conj().T - b) / ell for b in system.basis])
        branches.append(br)
    return LinearSeminorm("action", system, branches)


def metric_family(system: OperatorSystem, dist: Array) -> LinearSeminorm:
    """Lipschitz seminorm of a finite metric space realized on diagonals.

    The system basis must be the diagonal matrix units E_pp; branch (p, q)
    sends f to the 1x1 matrix (f(p) - f(q)) / rho(p, q).
    """
    n = dist.shape[0]
    branches = []
    for p in range(n):
        for q in range(p + 1, n):
            br = np.zeros((system.dim, 1, 1), dtype=np.complex128)
            br[p, 0, 0] = 1.0 / dist[p, q]
            br[q, 0, 0] = -1.0 / dist[p, q]
            branches.append(br)
    return LinearSeminorm("metric", system, branches)


def stabilized_family(base: LinearSeminorm, n: int) -> LinearSeminorm:
    """The family z |-> L_{s n}(I_s(z)) on M_n(system), itself linear.

    Branch images are e_pq (x) delta(b_k), so evaluation agrees with the
    forget-subdivisions route exactly (same matrix up to lexicographic
    block indexing).
    """
    amp = base.system.matrix_amplification(n)
    branches = []
    for br in base.branches:
        m, a, b = br.shape
        lifted = np.zeros((n * n * m, n * a, n * b), dtype=np.complex128)
        for p in range(n):
            for q in range(n):
                for k in range(m):
                    lifted[(p * n + q) * m + k,
                           p * a:(p + 1) * a, q * b:(q + 1) * b] = br[k]
        branches.append(lifted)
    fam = LinearSeminorm("stabilized", amp, branches)
    fam.base = base
    fam.stabilization = n
    return fam


def tensor_lift(base: LinearSeminorm, tsys: TensorSystem, side: str) -> LinearSeminorm:
    """Exact tensor family (L (x) 1) or (1 (x) K) on a tensor system.

    For commutator families this is the derivation route
    (L_D (x) 1)_s(z) = ||(d (x) 1)_s(z)||, and for action families the
    amplified action of alpha (x) id; both realize the supremum over UCP
    maps of the sampled route.
    """
    if side == "left":
        if base.system is not tsys.left:
            raise DimensionMismatch("base family must live on the left factor")
        other = tsys.right
        branches = [
            np.stack([np.kron(br[k], y) for k in range(br.shape[0]) for y in other.basis])
            for br in base.branches]
        kind = "tensor-left"
    elif side == "right":
        if base.system is not tsys.right:
            raise DimensionMismatch("base family must live on the right factor")
        other = tsys.left
        branches = [
            np.stack([np.kron(x, br[k]) for x in other.basis for k in range(br.shape[0])])
            for br in base.branches]
        kind = "tensor-right"
    else:
        raise ValueError("side must be 'left' or 'right'")
    fam = LinearSeminorm(kind, tsys, branches)
    fam.base = base
    return fam


class MaxSeminorm(SeminormFamily):
    """Pointwise maximum of two families on the same system."""

    def __init__(self, left: SeminormFamily, right: SeminormFamily):
        if left.system is not right.system:
            raise DimensionMismatch("factor families live on different systems")
        self.kind = "max"
        self.system = left.system
        self.left = left
        self.right = right

    def eval(self, z: AmplifiedElement) -> float:
        return max(self.left.eval(z), self.right.eval(z))


def max_seminorm(left: SeminormFamily, right: SeminormFamily) -> MaxSeminorm:
    return MaxSeminorm(left, right)


# ---------------------------------------------------------------------------
# tensor seminorms: exact and sampled routes


def tensor_seminorm_exact(family: LinearSeminorm, tsys: TensorSystem,
                          z: AmplifiedElement, side: str = "left") -> float:
    return tensor_lift(family, tsys, side).eval(z)


def tensor_seminorm_sampled(family: SeminormFamily, z: AmplifiedElement,
                            n_samples: int, seed: int) -> float:
    """Lower bound sup_phi L^phi_s(z) over the deterministic UCP ensemble.

    L^phi_s(z) = L_{s n}(I_s((1 (x) phi)_s(z))); monotone nondecreasing in
    n_samples for a fixed seed (prefix property of the ensemble).
    """
    tsys = z.system
    if not isinstance(tsys, TensorSystem):
        raise DimensionMismatch("sampled tensor seminorm needs a tensor-system element")
    best = 0.0
    for phi in ucp_ensemble(tsys.right, n_samples, seed):
        w = forget_subdivisions(apply_ucp_right(z, phi))
        best = max(best, family.eval(w))
    return best


# ---------------------------------------------------------------------------
# axiom verification


@dataclass
class AxiomReport:
    direct_sum_max_residual: float
    bimodule_violation: float
    star_residual: float
    scalar_residual: float
    cases: int

    def max_residual(self) -> float:
        return max(self.direct_sum_max_residual, self.bimodule_violation,
                   self.star_residual, self.scalar_residual)


def _direct_sum(x: AmplifiedElement, y: AmplifiedElement) -> AmplifiedElement:
    s, r, m = x.level, y.level, x.system.dim
    c = np.zeros((s + r, s + r, m), dtype=np.complex128)
    c[:s, :s] = x.coeffs
    c[s:, s:] = y.coeffs
    return AmplifiedElement(x.system, s + r, c)


def check_axioms(family: SeminormFamily, max_level: int, trials: int,
                 seed: int) -> AxiomReport:
    """Sampled verification of the operator-seminorm axioms.

    Records the worst residual of the direct-sum maximum law, the bimodule
    inequality, *-invariance, and vanishing on scalar matrices.
    """
    if max_level < 2:
        raise ValueError("max_level must be >= 2")
    rng = np.random.default_rng(seed)
    sys_ = family.system
    ds_res = bim_res = star_res = scal_res = 0.0
    for _ in range(trials):
        s = int(rng.integers(1, max_level))
        r = int(rng.integers(1, max_level + 1 - s))
        x = sys_.random_element(rng, s)
        y = sys_.random_element(rng, r)
        lhs = family.eval(_direct_sum(x, y))
        rhs = max(family.eval(x), family.eval(y))
        ds_res = max(ds_res, abs(lhs - rhs))

        v = rng.standard_normal((s, s)) + 1j * rng.standard_normal((s, s))
        w = rng.standard_normal((s, s)) + 1j * rng.standard_normal((s, s))
        lv = family.eval(x.bimodule(v, w))
        bound = operator_norm(v) * family.eval(x) * operator_norm(w)
        bim_res = max(bim_res, max(0.0, lv - bound))

        star_res = max(star_res, abs(family.eval(x.adjoint()) - family.eval(x)))
        scal_res = max(scal_res, family.eval(scalar_element(sys_, v)))
    return AxiomReport(ds_res, bim_res, star_res, scal_res, trials)


def entrywise_bounds_check(family: SeminormFamily, z: AmplifiedElement,
                           tol: float = TOL.comparison):
    """Both entrywise inequalities: L_s(x) <= sum L_1(x_ij), L_1(x_kl) <= L_s(x).

    Returns (passed, residuals) with residuals the worst violations.
    """
    s, m = z.level, z.system.dim
    total = family.eval(z)
    entries = np.empty((s, s))
    for i in range(s):
        for j in range(s):
            entries[i, j] = family.eval(
                AmplifiedElement(z.system, 1, z.coeffs[i, j].reshape(1, 1, m)))
    upper_violation = max(0.0, total - entries.sum())
    lower_violation = max(0.0, float(entries.max()) - total)
    passed = upper_violation <= tol and lower_violation <= tol
    return passed, {"upper": upper_violation, "lower": lower_violation}
