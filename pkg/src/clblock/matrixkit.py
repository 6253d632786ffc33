"""Dense complex 2x2 / 4x4 matrix helpers.

Multiplication and inversion are thin, validated wrappers around numpy
(LAPACK LU with partial pivoting underneath).  The 2x2 eigensolver is
closed-form via the characteristic quadratic so that downstream error-box
extraction is fully deterministic.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateEigenError, SingularMatrixError

#: relative determinant floor below which a matrix is treated as singular
SINGULAR_FLOOR = 1e-14

#: relative eigenvalue separation below which a 2x2 is treated as degenerate
DEGENERATE_FLOOR = 1e-9


def _as_square(a, name="matrix"):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] not in (2, 4):
        raise ValueError(f"{name} must be 2x2 or 4x4, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def norm_inf(a) -> float:
    """Induced infinity norm (maximum absolute row sum)."""
    a = np.asarray(a)
    return float(np.abs(a).sum(axis=1).max())


def mat_mul(a, b) -> np.ndarray:
    """Matrix product of two equal-size 2x2 or 4x4 matrices."""
    a = _as_square(a, "a")
    b = _as_square(b, "b")
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b


def mat_inv(a) -> np.ndarray:
    """Inverse of a well-conditioned 2x2 or 4x4 matrix.

    Raises SingularMatrixError when |det| <= SINGULAR_FLOOR * ||a||_inf
    (the zero matrix included).
    """
    a = _as_square(a, "a")
    det = np.linalg.det(a)
    if abs(det) <= SINGULAR_FLOOR * norm_inf(a):
        raise SingularMatrixError(f"matrix is singular (|det| = {abs(det):.3e})")
    return np.linalg.inv(a)


def eig_2x2(a):
    """Closed-form eigendecomposition of a 2x2 complex matrix.

    Returns ((lam1, v1), (lam2, v2)) with lam1 = tr/2 + s and
    lam2 = tr/2 - s, s the principal square root of (tr/2)^2 - det.
    Eigenvectors have unit Euclidean norm and their first entry of
    magnitude above 1e-12 rotated to the positive real axis.

    Raises DegenerateEigenError when the two eigenvalues are closer than
    DEGENERATE_FLOOR relative to their magnitude (includes the nilpotent
    and zero cases, where eigenvectors are not well determined).
    """
    a = _as_square(a, "a")
    if a.shape[0] != 2:
        raise ValueError("eig_2x2 requires a 2x2 matrix")
    half_tr = 0.5 * (a[0, 0] + a[1, 1])
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    s = np.sqrt(half_tr * half_tr - det + 0j)
    lam1 = half_tr + s
    lam2 = half_tr - s
    if abs(lam1 - lam2) <= DEGENERATE_FLOOR * max(abs(lam1), abs(lam2)):
        raise DegenerateEigenError(
            f"eigenvalues {lam1:.6g} and {lam2:.6g} are (near-)degenerate"
        )
    return (lam1, _eigvec(a, lam1)), (lam2, _eigvec(a, lam2))


def _eigvec(a, lam):
    # null vector of (a - lam I); take the larger of the two row-based
    # candidates for numerical robustness
    cand1 = np.array([a[0, 1], lam - a[0, 0]])
    cand2 = np.array([lam - a[1, 1], a[1, 0]])
    v = cand1 if np.linalg.norm(cand1) >= np.linalg.norm(cand2) else cand2
    n = np.linalg.norm(v)
    if n == 0.0:  # diagonal matrix: basis vector for this eigenvalue
        v = np.array([1.0, 0.0]) if abs(a[0, 0] - lam) <= abs(a[1, 1] - lam) else np.array([0.0, 1.0])
        n = 1.0
    v = v / n
    # phase convention: first non-negligible entry positive real
    for comp in v:
        if abs(comp) > 1e-12:
            v = v * (abs(comp) / comp)
            break
    return v
