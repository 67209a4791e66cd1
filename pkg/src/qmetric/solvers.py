"""Optimization backends: scalar-shift minimization and ratio maximization.

Two problem shapes cover every optimization in the package:

* ``nearest_scalar`` — minimize ``||Z - v (x) I_d||`` over scalar block
  matrices ``v``; convex, solved with cvxpy, feasibility gives a certified
  upper bound.
* ``maximize_ratio`` — maximize ``N(c) / L(c)`` where both numerator and
  denominator are maxima of operator norms of linear matrix maps of a real
  coefficient vector; solved by multi-start supergradient ascent with a
  Nelder-Mead polish, optionally cross-checked by an adaptive grid search
  (the brute-force oracle) in low dimension.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import cvxpy as cp
import numpy as np
from scipy import optimize

from .config import TOL
from .errors import SolverDidNotConverge
from .linalg import Array, as_complex, hermitian_eigen, is_hermitian, operator_norm


@dataclass(eq=False)
class SolverReport:
    value: float
    certificate: str            # 'exact' | 'upper_bound' | 'lower_bound'
    iterations: int = 0
    restarts: int = 0
    seed: int | None = None
    residual_history: list = field(default_factory=list)
    infinite: bool = False
    argmax: Array | None = None

    def __post_init__(self):
        if self.certificate not in ("exact", "upper_bound", "lower_bound"):
            raise ValueError(f"unknown certificate {self.certificate!r}")


# ---------------------------------------------------------------------------
# nearest scalar block matrix


def nearest_scalar(Z: Array, s: int, d: int) -> tuple[float, Array]:
    """Minimize ||Z - v (x) I_d|| over v in M_s(C).

    Returns (value, v). The value is evaluated at the returned v with plain
    numpy, so it is always a certified upper bound on the true infimum; for
    s = 1 Hermitian input the closed form (lmax - lmin)/2 is exact.
    """
    Z = as_complex(Z)
    if Z.shape != (s * d, s * d):
        raise ValueError(f"expected shape {(s * d, s * d)}, got {Z.shape}")
    if s == 1 and is_hermitian(Z):
        w = hermitian_eigen(Z).eigenvalues
        mid = (w[-1] + w[0]) / 2.0
        return float((w[-1] - w[0]) / 2.0), np.array([[mid]], dtype=np.complex128)

    v = cp.Variable((s, s), complex=True)
    eye_d = np.eye(d)
    expr = cp.Constant(Z)
    for i in range(s):
        for j in range(s):
            e = np.zeros((s, s))
            e[i, j] = 1.0
            expr = expr - cp.multiply(v[i, j], cp.Constant(np.kron(e, eye_d)))
    problem = cp.Problem(cp.Minimize(cp.norm(expr, 2)))
    try:
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # reduced-accuracy warnings; we re-evaluate
            problem.solve(solver=cp.CLARABEL, tol_gap_abs=1e-11, tol_gap_rel=1e-11,
                          tol_feas=1e-11)
        v_opt = np.asarray(v.value, dtype=np.complex128)
    except (cp.SolverError, TypeError):
        v_opt = None

    # candidate shifts; evaluating with numpy keeps the bound honest
    candidates = [np.zeros((s, s), dtype=np.complex128)]
    if v_opt is not None and np.all(np.isfinite(v_opt)):
        candidates.append(v_opt)
    best_val, best_v = np.inf, candidates[0]
    for cand in candidates:
        val = operator_norm(Z - np.kron(cand, eye_d))
        if val < best_val:
            best_val, best_v = val, cand
    if v_opt is None:
        raise SolverDidNotConverge(f"nearest_scalar fell back to v=0, value {best_val}")
    return float(best_val), best_v


# ---------------------------------------------------------------------------
# ratio maximization over linear matrix maps
#
# A "branch" is an array of shape (p, a, b); it represents the linear map
# c |-> sum_t c_t A[t] from real coefficient vectors to complex matrices.
# An objective is max over branches of the operator norm of that matrix.


def branch_value(branches: list[Array], c: Array) -> float:
    return max(operator_norm(np.tensordot(c, br, axes=(0, 0))) for br in branches)


def _value_and_grad(branches: list[Array], c: Array) -> tuple[float, Array]:
    best, grad = -1.0, None
    for br in branches:
        m = np.tensordot(c, br, axes=(0, 0))
        u_mat, sv, vh = np.linalg.svd(m)
        if sv[0] > best:
            best = float(sv[0])
            u, v = u_mat[:, 0], vh[0].conj()
            grad = np.real(np.einsum("i,tij,j->t", u.conj(), br, v))
    return best, grad


def kernel_split(branches: list[Array], p: int,
                 cutoff: float = TOL.rank_cutoff) -> tuple[Array, Array]:
    """Row-space / null-space split of the stacked branch maps.

    Returns (complement, kernel): orthonormal bases (columns) of the
    subspace where the objective can be nonzero and of its orthogonal
    complement (directions annihilated by every branch).
    """
    rows = []
    for br in branches:
        flat = br.reshape(p, -1)
        rows.append(flat.real.T)
        rows.append(flat.imag.T)
    stacked = np.vstack(rows)  # (sum 2ab, p)
    u, sv, vh = np.linalg.svd(stacked, full_matrices=True)
    rank = int(np.sum(sv > cutoff * max(1.0, sv[0] if len(sv) else 1.0)))
    return vh[:rank].T, vh[rank:].T


def maximize_ratio(num_branches: list[Array], den_branches: list[Array],
                   seed: int, restarts: int = 8, iterations: int = 500,
                   polish: bool = True) -> SolverReport:
    """Maximize max-norm(N(c)) / max-norm(L(c)) over nonzero real c.

    Supergradient ascent on the log-ratio with 1/sqrt(t) steps, multistart,
    then a Nelder-Mead polish from the incumbent. The returned value is a
    certified lower bound (it is attained at the reported argmax).
    """
    p = num_branches[0].shape[0]
    rng = np.random.default_rng(seed)
    best_val, best_c, history = 0.0, None, []
    for _ in range(restarts):
        c = rng.standard_normal(p)
        c /= np.linalg.norm(c)
        for t in range(1, iterations + 1):
            nv, ng = _value_and_grad(num_branches, c)
            dv, dg = _value_and_grad(den_branches, c)
            if dv < 1e-13:
                c = rng.standard_normal(p)
                c /= np.linalg.norm(c)
                continue
            ratio = nv / dv
            if ratio > best_val:
                best_val, best_c = ratio, c.copy()
            if nv < 1e-15:
                break
            step = 0.5 / np.sqrt(t)
            g = ng / max(nv, 1e-15) - dg / dv
            gn = np.linalg.norm(g)
            if gn < 1e-14:
                break
            c = c + step * g / gn
            c /= np.linalg.norm(c)
        history.append(best_val)

    if best_c is None:
        return SolverReport(0.0, "lower_bound", iterations, restarts, seed, history)

    if polish:
        def neg_ratio(c):
            dv = branch_value(den_branches, c)
            if dv < 1e-13:
                return 0.0
            return -branch_value(num_branches, c) / dv
        res = optimize.minimize(neg_ratio, best_c, method="Nelder-Mead",
                                options={"maxiter": 600, "xatol": 1e-10, "fatol": 1e-12})
        if -res.fun > best_val:
            best_val, best_c = -float(res.fun), res.x
    history.append(best_val)
    return SolverReport(float(best_val), "lower_bound", iterations, restarts,
                        seed, history, argmax=best_c)


def grid_max_ratio(num_branches: list[Array], den_branches: list[Array],
                   rounds: int = 8, polish: bool = True) -> SolverReport:
    """Brute-force oracle: adaptive grid search over the coefficient sphere.

    Exhaustive box grid with geometric refinement around the incumbent;
    intended as an independent check for real dimension <= 6.
    """
    p = num_branches[0].shape[0]
    if p > 6:
        raise ValueError("grid oracle limited to dimension <= 6")
    points_per_dim = {1: 41, 2: 21, 3: 13, 4: 9, 5: 6, 6: 5}[p]

    def ratio(c):
        n = np.linalg.norm(c)
        if n < 1e-12:
            return 0.0
        c = c / n
        dv = branch_value(den_branches, c)
        if dv < 1e-11:
            return 0.0
        return branch_value(num_branches, c) / dv

    center = np.zeros(p)
    width = 1.0
    best_val, best_c = 0.0, None
    for _ in range(rounds):
        axes = [np.linspace(center[i] - width, center[i] + width, points_per_dim)
                for i in range(p)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, p)
        for c in mesh:
            val = ratio(c)
            if val > best_val:
                best_val, best_c = val, c / max(np.linalg.norm(c), 1e-12)
        if best_c is not None:
            center = best_c
        width *= 0.5
    if best_c is not None and polish:
        res = optimize.minimize(lambda c: -ratio(c), best_c, method="Nelder-Mead",
                                options={"maxiter": 800, "xatol": 1e-12, "fatol": 1e-14})
        if -res.fun > best_val:
            best_val, best_c = -float(res.fun), res.x
    return SolverReport(float(best_val), "exact", rounds, 1, None, argmax=best_c)
