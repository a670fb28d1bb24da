"""Real-symmetric eigendecomposition and Moore-Penrose pseudo-inverse.

Thin wrappers over LAPACK (through numpy.linalg) which add the two
things the density construction depends on: eigenvalues sorted in
descending order, and an explicit relative rank tolerance that decides
which near-zero values are truncated when inverting.  The Gram matrices
handled here always carry exact zero eigenvalues (the constraint matrix
is rectangular), so the truncation rule is load-bearing, not hygiene.

All arithmetic is real double precision.  LAPACK's divide-and-conquer
drivers are deterministic for identical input bits, which downstream
reproducibility tests rely on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def default_rank_tol(dim: int) -> float:
    """Relative tolerance below which a spectrum entry counts as zero."""
    return dim * np.finfo(np.float64).eps


@dataclass(frozen=True)
class EigenDecomposition:
    """Orthogonal U and eigenvalues sigma (descending) with A = U diag(sigma) U'."""

    U: np.ndarray
    sigma: np.ndarray
    rank: int
    tol_used: float


@dataclass(frozen=True)
class PseudoInverse:
    """Moore-Penrose inverse with the truncation tolerance that produced it."""

    matrix: np.ndarray
    tolerance_used: float
    rank: int


def eig_sym(matrix: np.ndarray, sym_tol: float = 1e-8, rank_tol: float | None = None) -> EigenDecomposition:
    """Eigendecomposition of a real symmetric matrix, eigenvalues descending.

    ``rank`` counts eigenvalues above ``rank_tol`` times the largest one
    (default: dimension times machine epsilon).  Raises ``ValueError``
    for input that is not symmetric within ``sym_tol`` relative to its
    magnitude, and propagates ``numpy.linalg.LinAlgError`` if the solver
    fails to converge.
    """
    A = np.asarray(matrix, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A))))
    if float(np.max(np.abs(A - A.T))) > sym_tol * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    w, V = np.linalg.eigh((A + A.T) / 2.0)
    sigma = w[::-1].copy()
    U = V[:, ::-1].copy()
    tol = default_rank_tol(A.shape[0]) if rank_tol is None else float(rank_tol)
    top = float(sigma[0]) if sigma.size else 0.0
    rank = int(np.count_nonzero(sigma > tol * max(top, 0.0))) if top > 0 else 0
    return EigenDecomposition(U=U, sigma=sigma, rank=rank, tol_used=tol)


def pinv_diag(sigma: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Entry-wise pseudo-inverse of a nonnegative spectrum.

    Entries above ``tol * max(sigma)`` are reciprocated, the rest set to
    zero.  An all-zero (or empty) spectrum maps to itself.
    """
    s = np.asarray(sigma, dtype=np.float64)
    if s.size == 0:
        return s.copy()
    tol = default_rank_tol(s.size) if tol is None else float(tol)
    cutoff = tol * float(np.max(s))
    out = np.zeros_like(s)
    keep = s > cutoff
    out[keep] = 1.0 / s[keep]
    return out


def pinv(matrix: np.ndarray, tol: float | None = None) -> PseudoInverse:
    """Moore-Penrose pseudo-inverse via SVD with threshold truncation."""
    A = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    tol = default_rank_tol(max(A.shape)) if tol is None else float(tol)
    cutoff = tol * (float(s[0]) if s.size else 0.0)
    keep = s > cutoff
    rank = int(np.count_nonzero(keep))
    out = (Vt[keep].T / s[keep]) @ U[:, keep].T
    return PseudoInverse(matrix=out, tolerance_used=tol, rank=rank)
