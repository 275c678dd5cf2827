"""Finite-dimensional matrix algebra: trace, Schatten norms, PSD functional calculus.

Matrices are plain ``numpy`` arrays of shape ``(n, n)`` and dtype complex128.
All functional calculus goes through one numerical primitive: the
eigendecomposition of the Hermitian symmetrization ``(A + A*)/2``.
"""

from __future__ import annotations

import math

import numpy as np

# Negative-eigenvalue clamp for PSD inputs, relative to the spectral radius.
PSD_CLAMP_REL = 1e-10
# Hermitian acceptance tolerance, relative.
HERM_TOL_REL = 1e-10
# Rank cutoff for pseudo-inverses, relative to the top eigenvalue.
PINV_RANK_REL = 1e-12


def as_matrix(a) -> np.ndarray:
    """Coerce input to a square complex matrix, rejecting NaN/Inf entries."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise ValueError("matrix has non-finite entries")
    return m


def adjoint(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def trace(a: np.ndarray) -> complex:
    return complex(np.trace(a))


def herm_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + adjoint(a))


def singular_values(a: np.ndarray) -> np.ndarray:
    """Singular values, descending, via the Hermitian eigenproblem for A*A."""
    m = as_matrix(a)
    w = np.linalg.eigvalsh(herm_part(adjoint(m) @ m))
    return np.sqrt(np.clip(w, 0.0, None))[::-1]


def schatten_norm(a: np.ndarray, p: float) -> float:
    """Schatten p-norm (sum of singular values to the p, root 1/p); p=inf is the operator norm.

    Raises ValueError for p < 1 or non-finite entries.
    """
    if not (p >= 1.0):
        raise ValueError(f"Schatten norm needs p >= 1, got {p}")
    s = singular_values(a)
    top = s[0] if s.size else 0.0
    if top == 0.0:
        return 0.0
    if math.isinf(p):
        return float(top)
    if p == 1.0:
        return float(np.sum(s))
    if p == 2.0:
        return float(np.sqrt(np.sum(s * s)))
    # Scale by the top singular value so large p cannot overflow.
    return float(top * np.sum((s / top) ** p) ** (1.0 / p))


def sqrt_psd(a: np.ndarray, pseudo_inverse: bool = False) -> np.ndarray:
    """PSD square root B of a Hermitian PSD matrix, or its Moore-Penrose inverse B+.

    Eigenvalues in ``[-eps, 0)`` with ``eps = 1e-10 * ||A||_inf`` are rounding
    debris from quadrature and get clamped to zero; anything more negative is
    an error.  With ``pseudo_inverse`` the eigenvalues below the rank cutoff
    ``1e-12 * lambda_max`` map to zero (inverse only on the range).
    """
    m = as_matrix(a)
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if float(np.max(np.abs(m - adjoint(m)))) > HERM_TOL_REL * max(scale, 1e-300):
        raise ValueError("not Hermitian")
    w, u = np.linalg.eigh(herm_part(m))
    lam_max = float(w[-1]) if w.size else 0.0
    eps_tol = PSD_CLAMP_REL * max(lam_max, scale)
    if w[0] < -eps_tol:
        raise ValueError(f"not PSD: eigenvalue {w[0]:.3e} below -{eps_tol:.3e}")
    w = np.clip(w, 0.0, None)
    if pseudo_inverse:
        cutoff = PINV_RANK_REL * lam_max
        d = np.where(w > cutoff, 1.0 / np.sqrt(np.where(w > cutoff, w, 1.0)), 0.0)
    else:
        d = np.sqrt(w)
    return (u * d) @ adjoint(u)
