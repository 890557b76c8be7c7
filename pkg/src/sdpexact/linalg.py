"""Dense symmetric linear algebra with explicit tolerances.

Everything in here operates on small (dim <= ~50) dense symmetric matrices.
The eigensolver is a cyclic Jacobi iteration: for the matrix sizes we care
about, robustness and determinism matter far more than speed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

# Default relative tolerances.  Solver accuracy is ~1e-7, so classification
# thresholds must not be tighter than that.
SYM_TOL = 1e-12
PSD_TOL = 1e-7
RANK_TOL = 1e-7

JACOBI_SWEEP_CAP = 100
JACOBI_OFFDIAG_TOL = 1e-12


class PsdStatus(enum.Enum):
    POSITIVE_DEFINITE = "POSITIVE_DEFINITE"
    PSD_SINGULAR = "PSD_SINGULAR"
    INDEFINITE = "INDEFINITE"
    NSD_SINGULAR = "NSD_SINGULAR"
    NEGATIVE_DEFINITE = "NEGATIVE_DEFINITE"
    ZERO = "ZERO"


def sym(entries) -> np.ndarray:
    """Symmetrize and validate a dense square matrix.

    Raises ValueError if the input is not square, or if the skew part exceeds
    SYM_TOL relative to the matrix norm (a genuinely asymmetric input is a
    caller bug, not something to silently average away).
    """
    a = np.asarray(entries, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise ValueError("dim must be >= 1")
    scale = max(1.0, float(np.linalg.norm(a, "fro")))
    if np.linalg.norm(a - a.T, "fro") > SYM_TOL * scale * 10:
        raise ValueError("matrix is not symmetric within tolerance")
    return 0.5 * (a + a.T)


@dataclass(frozen=True)
class Spectrum:
    """Full eigendecomposition: ascending eigenvalues, orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    app, aqq, apq = a[p, p], a[q, q], a[p, q]
    phi = 0.5 * np.arctan2(2.0 * apq, aqq - app)
    c, s = np.cos(phi), np.sin(phi)
    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = c * col_p - s * col_q
    a[:, q] = s * col_p + c * col_q
    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = c * row_p - s * row_q
    a[q, :] = s * row_p + c * row_q
    a[p, q] = 0.0
    a[q, p] = 0.0
    vp = v[:, p].copy()
    vq = v[:, q].copy()
    v[:, p] = c * vp - s * vq
    v[:, q] = s * vp + c * vq


def eig_sym(S) -> Spectrum:
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Sweeps until the off-diagonal Frobenius norm drops below
    JACOBI_OFFDIAG_TOL * ||S||_F, capped at JACOBI_SWEEP_CAP sweeps (reaching
    the cap on a symmetric input would be an internal defect).
    """
    a = sym(S).copy()
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return Spectrum(eigenvalues=a[0].copy(), eigenvectors=v)
    norm = np.linalg.norm(a, "fro")
    thresh = JACOBI_OFFDIAG_TOL * max(norm, np.finfo(float).tiny)
    for _ in range(JACOBI_SWEEP_CAP):
        off = np.sqrt(max(0.0, norm**2 - np.sum(np.diag(a) ** 2)))
        off = np.linalg.norm(a - np.diag(np.diag(a)), "fro")
        if off <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) > thresh / (n * n):
                    _jacobi_rotate(a, v, p, q)
    else:
        off = np.linalg.norm(a - np.diag(np.diag(a)), "fro")
        if off > thresh * 100:
            raise RuntimeError("Jacobi iteration failed to converge (internal defect)")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return Spectrum(eigenvalues=w[order], eigenvectors=v[:, order])


def psd_status(S, tol: float = PSD_TOL) -> PsdStatus:
    """Classify a symmetric matrix by eigenvalue signs at a relative threshold."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = sym(S)
    w = eig_sym(s).eigenvalues
    spectral = float(np.max(np.abs(w))) if w.size else 0.0
    if spectral <= tol:
        return PsdStatus.ZERO
    cut = tol * max(1.0, spectral)
    n_pos = int(np.sum(w > cut))
    n_neg = int(np.sum(w < -cut))
    n_zero = w.size - n_pos - n_neg
    if n_neg == 0 and n_zero == 0:
        return PsdStatus.POSITIVE_DEFINITE
    if n_neg == 0:
        return PsdStatus.PSD_SINGULAR
    if n_pos == 0 and n_zero == 0:
        return PsdStatus.NEGATIVE_DEFINITE
    if n_pos == 0:
        return PsdStatus.NSD_SINGULAR
    return PsdStatus.INDEFINITE


def rank_eps(S, tol: float = RANK_TOL) -> int:
    """Numerical rank: eigenvalues with |lambda| > tol * max(1, ||S||_2)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    w = eig_sym(S).eigenvalues
    spectral = float(np.max(np.abs(w))) if w.size else 0.0
    cut = tol * max(1.0, spectral)
    return int(np.sum(np.abs(w) > cut))


def kernel_basis(S, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical kernel of S.

    Returns a (dim, k) array; k may be zero.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    spec = eig_sym(S)
    w = spec.eigenvalues
    spectral = float(np.max(np.abs(w))) if w.size else 0.0
    cut = tol * max(1.0, spectral)
    mask = np.abs(w) <= cut
    return spec.eigenvectors[:, mask]


def project_onto(v, basis: np.ndarray) -> np.ndarray:
    """Orthogonal projection of v onto span(basis columns)."""
    v = np.asarray(v, dtype=float)
    b = np.asarray(basis, dtype=float)
    if b.size == 0:
        return np.zeros_like(v)
    if b.ndim == 1:
        b = b[:, None]
    return b @ (b.T @ v)


def binary_quadratic_resultant(q1, q2) -> float:
    """Resultant of two binary quadratic forms.

    q1 = (a, b, c) means a*s^2 + b*s*t + c*t^2; likewise q2 = (d, e, f).
    The resultant (af - cd)^2 - (ae - bd)(bf - ce) vanishes exactly when the
    two forms share a nonzero common root over the complex numbers.
    """
    a, b, c = (float(x) for x in q1)
    d, e, f = (float(x) for x in q2)
    return (a * f - c * d) ** 2 - (a * e - b * d) * (b * f - c * e)
