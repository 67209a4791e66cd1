"""Concrete operator systems inside matrix algebras.

An operator system is a unital, adjoint-closed subspace of M_d(C) given by
a linearly independent basis.  Elements of the matrix amplification
M_s(system) are stored as coefficient arrays of shape (s, s, m) over the
basis; the realization is the concrete (s*d) x (s*d) block matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import solvers
from .config import TOL
from .errors import DimensionMismatch, QmetricError
from .linalg import Array, adjoint, as_complex, frobenius, haar_isometry


class OperatorSystem:
    """Unital *-invariant subspace of M_d(C) with a fixed basis.

    Attributes
    ----------
    ambient_dim : size d of the ambient matrix algebra
    basis : list of (d, d) arrays, linearly independent
    unit_coords : coordinates of I_d in the basis
    adjoint_matrix : S with coords(b_k^*) = S[:, k]
    """

    def __init__(self, basis, check: bool = True):
        self.basis = [as_complex(b) for b in basis]
        d = self.basis[0].shape[0]
        for b in self.basis:
            if b.shape != (d, d):
                raise DimensionMismatch("basis elements must be square of equal size")
        self.ambient_dim = d
        self.dim = len(self.basis)
        self._bmat = np.stack([b.reshape(-1) for b in self.basis], axis=1)  # (d^2, m)
        self._pinv = np.linalg.pinv(self._bmat)
        self._bstack = np.stack(self.basis)  # (m, d, d)

        if check:
            gram = self._bmat.conj().T @ self._bmat
            if np.linalg.matrix_rank(gram, tol=TOL.rank_cutoff) < self.dim:
                raise QmetricError("basis is linearly dependent")
        self.unit_coords = self.coords(np.eye(d))
        self.adjoint_matrix = np.stack(
            [self.coords(adjoint(b)) for b in self.basis], axis=1)
        self._herm_basis = None

    def coords(self, x: Array) -> Array:
        """Coefficient vector of x in the basis; raises if x leaves the span."""
        x = as_complex(x)
        c = self._pinv @ x.reshape(-1)
        residual = frobenius(self.element(c) - x)
        if residual > TOL.hermiticity * (1.0 + frobenius(x)):
            raise QmetricError(f"matrix outside the operator system, residual {residual:.2e}")
        return c

    def element(self, c: Array) -> Array:
        return np.tensordot(np.asarray(c), self._bstack, axes=(0, 0))

    def amplify(self, s: int, coeffs) -> "AmplifiedElement":
        return AmplifiedElement(self, s, coeffs)

    def from_matrix(self, s: int, Z: Array) -> "AmplifiedElement":
        """Inverse of realization: read off block coordinates."""
        Z = as_complex(Z)
        d = self.ambient_dim
        if Z.shape != (s * d, s * d):
            raise DimensionMismatch(f"expected {(s * d, s * d)}, got {Z.shape}")
        coeffs = np.empty((s, s, self.dim), dtype=np.complex128)
        for i in range(s):
            for j in range(s):
                coeffs[i, j] = self.coords(Z[i * d:(i + 1) * d, j * d:(j + 1) * d])
        return AmplifiedElement(self, s, coeffs)

    def hermitian_coeff_basis(self) -> Array:
        """Real basis of the Hermitian elements, as columns of coefficient vectors.

        A coefficient vector c gives a Hermitian element iff S conj(c) = c
        with S the adjoint matrix; the real solution space is computed once
        and cached.
        """
        if self._herm_basis is not None:
            return self._herm_basis
        m = self.dim
        S = self.adjoint_matrix
        eye = np.eye(m)
        top = np.hstack([S.real - eye, S.imag])
        bot = np.hstack([S.imag, -S.real - eye])
        _, sv, vh = np.linalg.svd(np.vstack([top, bot]))
        cols = vh[sv <= TOL.rank_cutoff].T  # (2m, r)
        herm = cols[:m] + 1j * cols[m:]
        self._herm_basis = herm
        return herm

    def random_element(self, rng: np.random.Generator, s: int,
                       hermitian: bool = False, scale: float = 1.0) -> "AmplifiedElement":
        c = scale * (rng.standard_normal((s, s, self.dim))
                     + 1j * rng.standard_normal((s, s, self.dim)))
        z = AmplifiedElement(self, s, c)
        if hermitian:
            z = (z + z.adjoint()) * 0.5
        return z

    def matrix_amplification(self, n: int) -> "OperatorSystem":
        """The operator system M_n(X) in M_{n d}(C), basis e_pq (x) b_k lex-ordered."""
        cache = getattr(self, "_amp_cache", None)
        if cache is None:
            cache = self._amp_cache = {}
        if n in cache:
            return cache[n]
        d, m = self.ambient_dim, self.dim
        basis = []
        for p in range(n):
            for q in range(n):
                e = np.zeros((n, n), dtype=np.complex128)
                e[p, q] = 1.0
                for k in range(m):
                    basis.append(np.kron(e, self.basis[k]))
        out = OperatorSystem(basis, check=False)
        out.stabilized_from = (self, n)
        cache[n] = out
        return out


class TensorSystem(OperatorSystem):
    """Operator system X (x) Y in M_{d1 d2}(C), basis kron(bx_k, by_l) lex."""

    def __init__(self, left: OperatorSystem, right: OperatorSystem):
        basis = [np.kron(a, b) for a in left.basis for b in right.basis]
        super().__init__(basis, check=False)
        self.left = left
        self.right = right


@dataclass(eq=False)
class AmplifiedElement:
    """Element of M_s(X): coefficients (s, s, m) over the system basis."""

    system: OperatorSystem
    level: int
    coeffs: Array

    def __post_init__(self):
        self.coeffs = as_complex(self.coeffs)
        expected = (self.level, self.level, self.system.dim)
        if self.coeffs.shape != expected:
            raise DimensionMismatch(
                f"coeffs shape {self.coeffs.shape}, expected {expected}")

    @property
    def realization(self) -> Array:
        s, d = self.level, self.system.ambient_dim
        blocks = np.einsum("ijk,kab->iajb", self.coeffs, self.system._bstack)
        return blocks.reshape(s * d, s * d)

    def adjoint(self) -> "AmplifiedElement":
        S = self.system.adjoint_matrix
        c = np.einsum("lk,ijk->jil", S, self.coeffs.conj())
        return AmplifiedElement(self.system, self.level, c)

    def __add__(self, other):
        return AmplifiedElement(self.system, self.level, self.coeffs + other.coeffs)

    def __sub__(self, other):
        return AmplifiedElement(self.system, self.level, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return AmplifiedElement(self.system, self.level, self.coeffs * scalar)

    __rmul__ = __mul__

    def norm(self) -> float:
        from .linalg import operator_norm
        return operator_norm(self.realization)

    def bimodule(self, v: Array, w: Array) -> "AmplifiedElement":
        """(v (x) I) z (w (x) I) for scalar matrices v, w."""
        v, w = as_complex(v), as_complex(w)
        c = np.einsum("ia,abk,bj->ijk", v, self.coeffs, w)
        return AmplifiedElement(self.system, v.shape[0], c)


def scalar_element(system: OperatorSystem, v: Array) -> AmplifiedElement:
    """The scalar block matrix v (x) I_d as an amplified element."""
    v = as_complex(v)
    s = v.shape[0]
    coeffs = np.einsum("ij,k->ijk", v, system.unit_coords)
    return AmplifiedElement(system, s, coeffs)


def forget_subdivisions(z: AmplifiedElement) -> AmplifiedElement:
    """Identify M_s(M_n(X)) with M_{s n}(X) by the lexicographic relabeling.

    The realization matrix is unchanged entry by entry; only the coefficient
    indexing is reshaped.  For n = 1 this is the identity.
    """
    origin = getattr(z.system, "stabilized_from", None)
    if origin is None:
        return z
    base, n = origin
    s, m = z.level, base.dim
    c = z.coeffs.reshape(s, s, n, n, m).transpose(0, 2, 1, 3, 4)
    return AmplifiedElement(base, s * n, c.reshape(s * n, s * n, m))


def quotient_norm(z: AmplifiedElement) -> float:
    """Distance of z to the scalar matrices M_s(C) (x) I_d in operator norm."""
    val, _ = solvers.nearest_scalar(z.realization, z.level, z.system.ambient_dim)
    return val


# ---------------------------------------------------------------------------
# unital completely positive maps


@dataclass(eq=False)
class UcpMap:
    """UCP map X -> M_n(C) given by its values on the basis.

    Generated maps are compressions b |-> V* b V with V* V = I_n, which are
    unital and completely positive by construction.
    """

    system: OperatorSystem
    target_dim: int
    values: list  # (n, n) array per basis index
    label: str = "ucp"

    def __post_init__(self):
        n = self.target_dim
        unit = self.apply(self.system.unit_coords)
        if frobenius(unit - np.eye(n)) > TOL.hermiticity * (1 + np.sqrt(n)):
            raise QmetricError(f"map {self.label} is not unital")

    def apply(self, c: Array) -> Array:
        return np.tensordot(np.asarray(c), np.stack(self.values), axes=(0, 0))

    def apply_matrix(self, x: Array) -> Array:
        return self.apply(self.system.coords(x))


def compression_map(system: OperatorSystem, V: Array, label: str = "compression") -> UcpMap:
    V = as_complex(V)
    values = [adjoint(V) @ b @ V for b in system.basis]
    return UcpMap(system, V.shape[1], values, label)


def identity_representation(system: OperatorSystem) -> UcpMap:
    return compression_map(system, np.eye(system.ambient_dim), "identity")


def vector_state(system: OperatorSystem, xi: Array, label: str = "vector-state") -> UcpMap:
    xi = as_complex(xi).reshape(-1, 1)
    xi = xi / np.linalg.norm(xi)
    return compression_map(system, xi, label)


def sample_ucp(system: OperatorSystem, n: int, seed) -> UcpMap:
    """Haar-random compression onto an n-dimensional subspace; deterministic in seed."""
    if n > system.ambient_dim:
        raise DimensionMismatch("compression target exceeds ambient dimension")
    rng = np.random.default_rng(seed)
    V = haar_isometry(rng, system.ambient_dim, n)
    return compression_map(system, V, f"haar-{n}")


def ucp_ensemble(system: OperatorSystem, count: int, seed: int) -> list[UcpMap]:
    """Deterministic UCP ensemble with the prefix property.

    The fixed head is the identity representation followed by the vector
    states of the standard frame; the tail is Haar compressions with target
    dimensions cycling 1..d, each drawn from an independently spawned seed.
    Truncating to a smaller count always yields a prefix of the longer list.
    """
    d = system.ambient_dim
    maps: list[UcpMap] = [identity_representation(system)]
    for j in range(d):
        e = np.zeros(d)
        e[j] = 1.0
        maps.append(vector_state(system, e, f"vector-state-{j}"))
    n_haar = max(0, count - len(maps))
    children = np.random.SeedSequence(seed).spawn(n_haar)
    for i, child in enumerate(children):
        maps.append(sample_ucp(system, 1 + i % d, child))
    return maps[:count]


def apply_ucp_right(z: AmplifiedElement, phi: UcpMap) -> AmplifiedElement:
    """(1 (x) phi) applied entrywise: (x (x) y) |-> x^{(+) n} phi(y).

    Input lives in M_s(X (x) Y); output in M_s(M_n(X)) over the matrix
    amplification of the left factor.
    """
    tsys = z.system
    if not isinstance(tsys, TensorSystem):
        raise DimensionMismatch("apply_ucp_right needs a tensor-system element")
    X, Y = tsys.left, tsys.right
    if phi.system is not Y:
        raise DimensionMismatch("UCP map must be defined on the right factor")
    s, n, mx, my = z.level, phi.target_dim, X.dim, Y.dim
    c = z.coeffs.reshape(s, s, mx, my)
    vals = np.stack(phi.values)  # (my, n, n)
    out = np.einsum("ijkl,lpq->ijpqk", c, vals).reshape(s, s, n * n * mx)
    return AmplifiedElement(X.matrix_amplification(n), s, out)
