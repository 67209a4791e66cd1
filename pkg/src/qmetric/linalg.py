"""Dense complex matrix arithmetic and spectral routines.

All operators in the package are plain ``numpy`` arrays with dtype
``complex128``; this module provides the handful of primitives everything
else is built from.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TOL
from .errors import DimensionMismatch, NotHermitian

Array = np.ndarray


def as_complex(m) -> Array:
    return np.asarray(m, dtype=np.complex128)


def adjoint(m: Array) -> Array:
    return as_complex(m).conj().T


def frobenius(m: Array) -> float:
    return float(np.linalg.norm(m))


def is_hermitian(m: Array, tol: float = TOL.hermiticity) -> bool:
    m = as_complex(m)
    return frobenius(m - adjoint(m)) <= tol * (1.0 + frobenius(m))


def operator_norm(m: Array) -> float:
    """Largest singular value (the C*-norm of a matrix)."""
    m = as_complex(m)
    if not np.any(m):
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])


@dataclass(frozen=True)
class HermitianEigenResult:
    eigenvalues: Array   # real, ascending
    eigenvectors: Array  # unitary; columns are eigenvectors


def hermitian_eigen(m: Array) -> HermitianEigenResult:
    """Spectral decomposition of a Hermitian matrix.

    Raises NotHermitian when the input fails the Hermiticity tolerance.
    """
    m = as_complex(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"square matrix expected, got {m.shape}")
    if not is_hermitian(m):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    w, q = np.linalg.eigh((m + adjoint(m)) / 2.0)
    return HermitianEigenResult(w, q)


def kron(a: Array, b: Array) -> Array:
    return np.kron(as_complex(a), as_complex(b))


def direct_sum(*blocks: Array) -> Array:
    blocks = [as_complex(b) for b in blocks]
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols), dtype=np.complex128)
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def commutator(a: Array, b: Array) -> Array:
    a, b = as_complex(a), as_complex(b)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"equal square matrices expected, got {a.shape} and {b.shape}")
    return a @ b - b @ a


def anticommutator(a: Array, b: Array) -> Array:
    a, b = as_complex(a), as_complex(b)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"equal square matrices expected, got {a.shape} and {b.shape}")
    return a @ b + b @ a


SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_2 = np.array([[0, 1j], [-1j, 0]], dtype=np.complex128)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def clifford_generators(m: int) -> list[Array]:
    """2m+1 Hermitian unitary mutually anticommuting matrices of size 2^m.

    Deterministic Pauli tensor-word construction: for j = 1..m the pair
    sz^(j-1) x sx x 1^(m-j) and sz^(j-1) x sy x 1^(m-j), closed off by sz^m.
    For m = 1 this yields sigma_1, sigma_2, sigma_3.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    eye = np.eye(2, dtype=np.complex128)

    def word(factors):
        out = np.ones((1, 1), dtype=np.complex128)
        for f in factors:
            out = np.kron(out, f)
        return out

    gammas = []
    for j in range(m):
        prefix = [SIGMA_3] * j
        suffix = [eye] * (m - j - 1)
        gammas.append(word(prefix + [SIGMA_1] + suffix))
        gammas.append(word(prefix + [SIGMA_2] + suffix))
    gammas.append(word([SIGMA_3] * m))
    return gammas


def random_hermitian(rng: np.random.Generator, d: int, scale: float = 1.0) -> Array:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * (g + g.conj().T) / 2.0


def random_complex(rng: np.random.Generator, shape, scale: float = 1.0) -> Array:
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def haar_isometry(rng: np.random.Generator, d: int, n: int) -> Array:
    """d x n isometry distributed by the Haar measure (QR with phase fix)."""
    if n > d:
        raise DimensionMismatch(f"isometry needs n <= d, got n={n}, d={d}")
    g = random_complex(rng, (d, n))
    q, r = np.linalg.qr(g)
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases.conj()
