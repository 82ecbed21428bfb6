"""Small dense complex linear algebra.

Everything in this package lives in 2x2 transfer matrices, the 4x4 Bloch
matching matrix, 4x4 density matrices and the 16x16 flattened Liouvillian,
so the helpers here are deliberately restricted to small square complex
matrices. They are thin wrappers over numpy with the argument checking and
error types the rest of the package relies on.
"""

from __future__ import annotations

import numpy as np

from .errors import NoNullSpace

__all__ = ["as_cmat", "matmul", "det", "null_vector", "eigvals"]

# Largest dimension we ever handle (flattened two-qubit Liouvillian).
MAX_DIM = 16


def as_cmat(a) -> np.ndarray:
    """Validate and return `a` as a square complex128 array.

    Raises ValueError for non-square input, dimensions above MAX_DIM, or
    non-finite entries.
    """
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] == 0 or m.shape[0] > MAX_DIM:
        raise ValueError(f"dimension {m.shape[0]} outside supported range 1..{MAX_DIM}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValueError("matrix entries must be finite")
    return m


def matmul(a, b) -> np.ndarray:
    """Matrix product with dimension checking."""
    am = as_cmat(a)
    bm = as_cmat(b)
    if am.shape != bm.shape:
        raise ValueError(f"dimension mismatch: {am.shape} vs {bm.shape}")
    return am @ bm


def det(a) -> complex:
    """Determinant by direct cofactor expansion, dimensions up to 4.

    The transfer and Bloch matrices are at most 4x4; a hand-rolled cofactor
    expansion at this size is exact in its operation count and keeps the
    hot 2x2 case allocation-free.
    """
    m = as_cmat(a)
    n = m.shape[0]
    if n > 4:
        raise ValueError("cofactor determinant limited to dimensions <= 4")
    return _det_rec(m)


def _det_rec(m: np.ndarray) -> complex:
    n = m.shape[0]
    if n == 1:
        return complex(m[0, 0])
    if n == 2:
        return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    acc = 0.0 + 0.0j
    sign = 1.0
    for j in range(n):
        minor = np.delete(m[1:], j, axis=1)
        acc += sign * m[0, j] * _det_rec(minor)
        sign = -sign
    return complex(acc)


def null_vector(a, tol: float = 1e-10) -> np.ndarray:
    """Unit-norm right null vector of `a`.

    Uses the SVD: the returned vector is the right singular vector of the
    smallest singular value, accepted only if sigma_min <= tol * sigma_max.
    For the all-zero matrix any vector qualifies; we return the first basis
    vector.

    Raises NoNullSpace when the smallest singular value is above tolerance.
    """
    m = as_cmat(a)
    n = m.shape[0]
    _, s, vh = np.linalg.svd(m)
    if s[0] == 0.0:
        e0 = np.zeros(n, dtype=complex)
        e0[0] = 1.0
        return e0
    if s[-1] > tol * s[0]:
        raise NoNullSpace(
            f"smallest singular value {s[-1]:.3e} exceeds tol*sigma_max = {tol * s[0]:.3e}"
        )
    return vh[-1].conj()


def eigvals(a) -> np.ndarray:
    """All eigenvalues of a general complex matrix, dimension <= 4, unordered.

    Backed by LAPACK through numpy; the QR iteration there is far more
    robust on defective matrices (repeated roots of rho rho~ for near-pure
    states) than quartic root finding. Non-convergence surfaces as
    numpy.linalg.LinAlgError.
    """
    m = as_cmat(a)
    if m.shape[0] > 4:
        raise ValueError("eigvals restricted to dimensions <= 4")
    return np.linalg.eigvals(m)
