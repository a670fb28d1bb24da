"""Density-matrix construction from the event matrix and marginal vector.

Given the m x N event matrix K and the marginal diagonal Lambda, the
construction solves K R K' = Lambda in the minimum-norm sense through
the Gram matrix J = K'K:

    R = U S+ U' K' Lambda K U S+ U'        with J = U S U'

which algebraically equals W Lambda W' for the weight matrix
W = (K'K)+ K' = K+.  Normalizing by the trace yields the density matrix
rho = R / tr(R); its diagonal is the joint outcome distribution, and the
quadratic forms K[i] R K[i]' reproduce every input marginal exactly
whenever K has full row rank, which holds for all supported n.  This is
an identity of R, not of rho: quadratic forms with rho are scaled down
by tr(R), so both residuals are reported.

Two routes are provided.  ``build_density`` follows the Gram-matrix
eigendecomposition above and can materialize R densely for n <= 10.
``diag_fast`` reaches W directly through a thin SVD of K, never forming
the N x N Gram matrix, and is the path for large n.  Their agreement is
a correctness check, not an assumption.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInstanceError, SchemaError
from .event_matrix import DENSE_MAX_N, EventMatrix, MAX_N
from .marginals import LambdaVector
from .spectral import eig_sym, pinv, pinv_diag


def _as_lambda_array(lam, m: int) -> np.ndarray:
    entries = lam.entries if isinstance(lam, LambdaVector) else lam
    arr = np.asarray(entries, dtype=np.float64)
    if arr.shape != (m,):
        raise SchemaError(f"expected {m} marginal entries, got shape {arr.shape}")
    return arr


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class DensityResult:
    """Everything the construction produces for one instance.

    ``R`` and ``rho`` are materialized only for n <= 10; the joint
    distribution, restored marginals and weight matrix are always
    present.  ``residual`` is max |K[i] R K[i]' - lambda_i| (the
    restoration contract); ``residual_rho`` the same with rho in place
    of R, which differs by the trace factor.
    """

    n: int
    lam: np.ndarray
    W: np.ndarray
    trace_R: float
    joint: np.ndarray
    restored: np.ndarray
    residual: float
    residual_rho: float
    effective_rank: int
    R: np.ndarray | None = None
    rho: np.ndarray | None = None


def weight_matrix(K: EventMatrix, rank_tol: float | None = None) -> np.ndarray:
    """W = K+ (N x m) via thin SVD of K.

    ``rank_tol`` is expressed against the Gram spectrum (eigenvalues of
    K'K), so the truncation decision matches the eigendecomposition
    route; singular values are thresholded at its square root.
    """
    tol = default_density_tol(K.N) if rank_tol is None else float(rank_tol)
    Kd = K.to_dense(max_n=MAX_N)
    return pinv(Kd, tol=math.sqrt(max(tol, 0.0))).matrix


def default_density_tol(N: int) -> float:
    return N * np.finfo(np.float64).eps


def build_density(K: EventMatrix, lam, rank_tol: float | None = None) -> DensityResult:
    """Construct R, rho and the joint distribution for one instance.

    For n <= 10 this forms the N x N Gram matrix, eigendecomposes it and
    materializes R densely.  For larger n it computes the diagonal data
    through the weight matrix without ever holding an N x N array.
    Raises ``DegenerateInstanceError`` when every marginal is zero, since
    rho = R / tr(R) is then undefined.
    """
    lam_arr = _as_lambda_array(lam, K.m)
    tol = default_density_tol(K.N) if rank_tol is None else float(rank_tol)
    if K.n > DENSE_MAX_N:
        return _density_via_weights(K, lam_arr, tol)

    Kd = K.to_dense(max_n=DENSE_MAX_N)
    J = Kd.T @ Kd
    dec = eig_sym(J, rank_tol=tol)
    splus = pinv_diag(dec.sigma, tol=dec.tol_used)
    # P = J+ = U S+ U'; W = J+ K' = K+
    P = (dec.U * splus) @ dec.U.T
    W = P @ Kd.T
    R = (W * lam_arr) @ W.T
    R = (R + R.T) / 2.0
    trace_R = float(np.trace(R))
    if trace_R <= 0.0:
        raise DegenerateInstanceError("all marginals are zero; rho is undefined")
    rho = R / trace_R
    joint = np.diag(rho).copy()
    restored = np.einsum("rc,cd,rd->r", Kd, R, Kd)
    residual = float(np.max(np.abs(restored - lam_arr)))
    residual_rho = float(np.max(np.abs(restored / trace_R - lam_arr)))
    return DensityResult(
        n=K.n,
        lam=_frozen(lam_arr.copy()),
        W=_frozen(W),
        trace_R=trace_R,
        joint=_frozen(joint),
        restored=_frozen(restored),
        residual=residual,
        residual_rho=residual_rho,
        effective_rank=dec.rank,
        R=_frozen(R),
        rho=_frozen(rho),
    )


def _density_via_weights(K: EventMatrix, lam_arr: np.ndarray, tol: float) -> DensityResult:
    Kd = K.to_dense(max_n=MAX_N)
    pi = pinv(Kd, tol=math.sqrt(max(tol, 0.0)))
    W = pi.matrix
    diag_R = (W * W) @ lam_arr
    trace_R = float(diag_R.sum())
    if trace_R <= 0.0:
        raise DegenerateInstanceError("all marginals are zero; rho is undefined")
    KW = Kd @ W
    restored = (KW * KW) @ lam_arr
    residual = float(np.max(np.abs(restored - lam_arr)))
    residual_rho = float(np.max(np.abs(restored / trace_R - lam_arr)))
    return DensityResult(
        n=K.n,
        lam=_frozen(lam_arr.copy()),
        W=_frozen(W),
        trace_R=trace_R,
        joint=_frozen(diag_R / trace_R),
        restored=_frozen(restored),
        residual=residual,
        residual_rho=residual_rho,
        effective_rank=pi.rank,
    )


def diag_fast(K: EventMatrix, lam, rank_tol: float | None = None):
    """Joint distribution and restored marginals without the N x N Gram matrix.

    Returns ``(joint, restored)``.  The weight matrix comes from a thin
    SVD of the m x N event matrix; the restored marginals from the m x m
    product (K W) Lambda (K W)'.  Agrees with ``build_density`` to
    within eigensolver rounding.
    """
    lam_arr = _as_lambda_array(lam, K.m)
    tol = default_density_tol(K.N) if rank_tol is None else float(rank_tol)
    res = _density_via_weights(K, lam_arr, tol)
    return res.joint, res.restored


def gleason_probability(result: DensityResult, subspace, unnormalized: bool = False) -> float:
    """Quadratic form x' rho x (or x' R x) for an indicator row x.

    The subspace is given as the sorted column indices of the basis
    vectors it joins.  With ``unnormalized=True`` the form is taken with
    R, which is the scaling under which the input marginals are restored
    exactly: K[i] R K[i]' = lambda_i.  With rho the same form equals
    that value divided by tr(R).
    """
    cols = _as_columns(result.n, subspace)
    v = result.W[cols, :].sum(axis=0)
    q = float((v * v) @ result.lam)
    return q if unnormalized else q / result.trace_R


def event_probability(result: DensityResult, subspace) -> float:
    """Additive outcome-mass measure: the sum of the joint distribution
    over the subspace's basis columns.

    This is the measure satisfying the probability-space axioms exactly
    (null space to 0, full space to 1, additivity over disjoint joins);
    it differs from the quadratic form by off-diagonal terms of rho.
    """
    cols = _as_columns(result.n, subspace)
    return float(result.joint[cols].sum())


def _as_columns(n: int, subspace) -> np.ndarray:
    cols = np.asarray(subspace, dtype=np.int64).ravel()
    if cols.size and (cols.min() < 0 or cols.max() >= (1 << n)):
        raise SchemaError(f"subspace columns out of range for n={n}")
    return cols
