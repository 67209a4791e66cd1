"""Finite-dimensional Lipschitz triples, stabilization, external products.

A triple is (A, H, D): a matrix algebra represented on H = C^d (the system
basis *is* the represented algebra), a Hermitian Dirac matrix D, and an
optional grading gamma making the triple even.  External products are built
case by case from the parities of the two factors; the odd/odd case doubles
the Hilbert space with Pauli matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TOL
from .errors import NotHermitian, ParityMismatch
from .linalg import (Array, SIGMA_1, SIGMA_2, SIGMA_3, as_complex, frobenius,
                     is_hermitian, operator_norm)
from .opsys import AmplifiedElement, OperatorSystem, TensorSystem
from .seminorms import LinearSeminorm, commutator_family, tensor_lift


class LipschitzTriple:
    """(A, H, D) with optional grading; source of commutator seminorms."""

    def __init__(self, system: OperatorSystem, dirac: Array,
                 grading: Array | None = None, parity: str | None = None):
        self.system = system
        self.dirac = as_complex(dirac)
        self.grading = None if grading is None else as_complex(grading)
        d = system.ambient_dim
        if self.dirac.shape != (d, d):
            raise ParityMismatch(f"Dirac shape {self.dirac.shape} vs ambient {d}")
        if not is_hermitian(self.dirac):
            raise NotHermitian("Dirac operator must be Hermitian")
        if parity is None:
            parity = "even" if self.grading is not None else "odd"
        if (parity == "even") != (self.grading is not None):
            raise ParityMismatch(f"parity {parity!r} inconsistent with grading presence")
        self.parity = parity
        if self.grading is not None:
            g = self.grading
            tol = TOL.hermiticity * (1 + frobenius(g))
            if frobenius(g @ g - np.eye(d)) > tol or not is_hermitian(g):
                raise ParityMismatch("grading must be a Hermitian unitary involution")
            if frobenius(g @ self.dirac + self.dirac @ g) > \
                    TOL.hermiticity * (1 + frobenius(self.dirac)):
                raise ParityMismatch("grading must anticommute with the Dirac operator")
            for b in system.basis:
                if frobenius(g @ b - b @ g) > TOL.hermiticity * (1 + frobenius(b)):
                    raise ParityMismatch("grading must commute with the algebra")

    @property
    def hilbert_dim(self) -> int:
        return self.system.ambient_dim

    def family(self) -> LinearSeminorm:
        return commutator_family(self.system, self.dirac)


def stabilize(triple: LipschitzTriple, n: int) -> LipschitzTriple:
    """(M_n(A), H^{(+) n}, D^{(+) n}), grading amplified alongside."""
    if n == 1:
        return triple
    eye = np.eye(n)
    grading = None if triple.grading is None else np.kron(eye, triple.grading)
    return LipschitzTriple(triple.system.matrix_amplification(n),
                           np.kron(eye, triple.dirac), grading)


@dataclass(eq=False)
class ProductTriple:
    factors: tuple
    parity_case: str            # 'even*even' | 'even*odd' | 'odd*even' | 'odd*odd'
    tensor: TensorSystem        # coordinates of the product algebra
    result: LipschitzTriple

    def element(self, z: AmplifiedElement) -> AmplifiedElement:
        """Reinterpret a tensor-coordinate element over the product system."""
        return AmplifiedElement(self.result.system, z.level, z.coeffs)


def external_product(t1: LipschitzTriple, t2: LipschitzTriple) -> ProductTriple:
    d1, d2 = t1.hilbert_dim, t2.hilbert_dim
    tsys = TensorSystem(t1.system, t2.system)
    case = f"{t1.parity}*{t2.parity}"
    e1, e2 = np.eye(d1), np.eye(d2)

    if case == "even*even":
        dirac = np.kron(t1.dirac, e2) + np.kron(t1.grading, t2.dirac)
        result = LipschitzTriple(tsys, dirac, np.kron(t1.grading, t2.grading))
    elif case == "even*odd":
        dirac = np.kron(t1.dirac, e2) + np.kron(t1.grading, t2.dirac)
        result = LipschitzTriple(tsys, dirac)
    elif case == "odd*even":
        dirac = np.kron(t1.dirac, t2.grading) + np.kron(e1, t2.dirac)
        result = LipschitzTriple(tsys, dirac)
    else:  # odd*odd: doubled Hilbert space C^2 (x) H1 (x) H2
        doubled = OperatorSystem([np.kron(np.eye(2), b) for b in tsys.basis],
                                 check=False)
        dirac = (np.kron(SIGMA_1, np.kron(t1.dirac, e2))
                 + np.kron(SIGMA_2, np.kron(e1, t2.dirac)))
        grading = np.kron(SIGMA_3, np.eye(d1 * d2))
        result = LipschitzTriple(doubled, dirac, grading)
    return ProductTriple((t1, t2), case, tsys, result)


def _factor_lifts(p: ProductTriple) -> tuple[LinearSeminorm, LinearSeminorm]:
    t1, t2 = p.factors
    return (tensor_lift(t1.family(), p.tensor, "left"),
            tensor_lift(t2.family(), p.tensor, "right"))


def product_seminorm_factorization(p: ProductTriple, z: AmplifiedElement):
    """((L_D1 (x) 1)_s(z), (1 (x) L_D2)_s(z), L_{(D1 x D2)^{(+) s}}(z))."""
    lift1, lift2 = _factor_lifts(p)
    prod = p.result.family().eval(p.element(z))
    return lift1.eval(z), lift2.eval(z), prod


def _recovery_data(p: ProductTriple):
    """Per parity case: the conjugating symmetry, signs and expected parts.

    Returns (G, [(sign, branch)]) where 1/2 (M + sign * G M G) must equal
    the entrywise extension of the branch, with M the realized product
    commutator of z.
    """
    t1, t2 = p.factors
    bx, by = t1.system.basis, t2.system.basis
    d1 = [t1.dirac @ b - b @ t1.dirac for b in bx]
    d2 = [t2.dirac @ b - b @ t2.dirac for b in by]
    eye1, eye2 = np.eye(t1.hilbert_dim), np.eye(t2.hilbert_dim)

    if p.parity_case in ("even*even", "even*odd"):
        G = np.kron(t1.grading, eye2)
        part1 = np.stack([np.kron(da, b) for da in d1 for b in by])
        part2 = np.stack([np.kron(t1.grading @ a, db) for a in bx for db in d2])
        return G, [(-1.0, part1), (1.0, part2)]
    if p.parity_case == "odd*even":
        G = np.kron(eye1, t2.grading)
        part1 = np.stack([np.kron(da, t2.grading @ b) for da in d1 for b in by])
        part2 = np.stack([np.kron(a, db) for a in bx for db in d2])
        return G, [(1.0, part1), (-1.0, part2)]
    # odd*odd on the doubled space
    G = np.kron(SIGMA_1, np.eye(t1.hilbert_dim * t2.hilbert_dim))
    part1 = np.stack([np.kron(SIGMA_1, np.kron(da, b)) for da in d1 for b in by])
    part2 = np.stack([np.kron(SIGMA_2, np.kron(a, db)) for a in bx for db in d2])
    return G, [(1.0, part1), (-1.0, part2)]


def check_product_inequality(p: ProductTriple, s: int, trials: int, seed: int):
    """Randomized check of the factor-norm inequality and recovery identities.

    For random z in M_s(A1 (x) A2): both factor seminorms are bounded by
    the product commutator norm, and the half-sum conjugation identities
    recover the two pieces of the product commutator as matrices.
    """
    rng = np.random.default_rng(seed)
    lift1, lift2 = _factor_lifts(p)
    fam = p.result.family()
    G0, parts = _recovery_data(p)
    violation = recovery_residual = 0.0
    for _ in range(trials):
        z = p.tensor.random_element(rng, s)
        left, right = lift1.eval(z), lift2.eval(z)
        prod = fam.eval(p.element(z))
        violation = max(violation, left - prod, right - prod)

        zr = p.element(z)
        M = np.einsum("ijk,kab->iajb", zr.coeffs, fam.branches[0]).reshape(
            s * p.result.hilbert_dim, s * p.result.hilbert_dim)
        Gs = np.kron(np.eye(s), G0)
        for sign, branch in parts:
            a = branch.shape[1]
            expected = np.einsum("ijk,kab->iajb", z.coeffs, branch).reshape(s * a, s * a)
            resid = operator_norm(0.5 * (M + sign * (Gs @ M @ Gs)) - expected)
            recovery_residual = max(recovery_residual,
                                    resid / (1.0 + operator_norm(M)))
    return {"violation": max(0.0, violation),
            "recovery_residual": recovery_residual,
            "trials": trials, "level": s, "case": p.parity_case}


def check_square_law(p: ProductTriple) -> float:
    """Residual of (D1 x D2)^2 = D1^2 (x) 1 + 1 (x) D2^2 (cross terms anticommute)."""
    t1, t2 = p.factors
    sq = np.kron(t1.dirac @ t1.dirac, np.eye(t2.hilbert_dim)) \
        + np.kron(np.eye(t1.hilbert_dim), t2.dirac @ t2.dirac)
    if p.parity_case == "odd*odd":
        sq = np.kron(np.eye(2), sq)
    D = p.result.dirac
    return frobenius(D @ D - sq)
