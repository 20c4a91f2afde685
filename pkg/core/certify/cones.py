"""
Cone Membership for the Matrix M

- is_dnn / is_diag_dominant: cheap membership tests
- dd_factorization: explicit CP factor of a diagonally dominant nonnegative matrix
- cp_rank2_embed: CP factor of a DNN matrix of rank <= 2
- cp_d3_decompose: CP factor of a 3x3 DNN matrix
- cp_search: heuristic CP factorization (multiplicative updates, then a bounded
  least-squares polish)
"""

import logging
import math
from itertools import permutations
from typing import Optional

import numpy as np
from scipy import linalg
from scipy.optimize import least_squares

from core.certify.certificates import CpFactorization
from core.errors import (
    BadParamError, DimensionMismatchError, NotDnnError, NumericalDegeneracyError,
    PreconditionError, RankTooHighError,
)
from core.numerics.matcore import MatrixLike, Tolerance, as_array, is_psd, numerical_rank, sym_eig

logger = logging.getLogger(__name__)

# ||M - B B^T||_F <= FACTOR_RTOL * (1 + ||M||_F) for a factor to count
FACTOR_RTOL = 1e-8
SEARCH_RTOL = 1e-7

MU_CHECK_EVERY = 50
MU_EPS = 1e-30


def is_dnn(m: MatrixLike, tol: Tolerance = Tolerance()) -> bool:
    """PSD and entrywise nonnegative."""
    a = as_array(m)
    return bool(a.min(initial=0.0) >= 0.0 and is_psd(a, tol))


def is_diag_dominant(m: MatrixLike) -> bool:
    """m(i,i) >= sum_{j != i} m(i,j) for every row."""
    a = as_array(m)
    diag = np.diag(a)
    off = a.sum(axis=1) - diag
    return bool(np.all(diag >= off))


def _factor_tolerance(a: np.ndarray, rtol: float = FACTOR_RTOL) -> float:
    return rtol * (1.0 + float(np.linalg.norm(a)))


def _require_dnn(a: np.ndarray, tol: Tolerance):
    if not is_dnn(a, tol):
        raise NotDnnError("Matrix is not doubly nonnegative")


def dd_factorization(m: MatrixLike, slack: float = 1e-12) -> CpFactorization:
    """
    CP factor of a diagonally dominant nonnegative matrix.

    M = sum_{i<j} M_ij (e_i + e_j)(e_i + e_j)^T + sum_i (M_ii - sum_{j!=i} M_ij) e_i e_i^T

    Args:
        m: Nonnegative symmetric matrix
        slack: Row deficits down to -slack * max|M| are treated as zero

    Raises:
        PreconditionError: if m is not diagonally dominant
    """
    a = as_array(m)
    if a.min(initial=0.0) < 0:
        raise NotDnnError("Matrix has negative entries")
    d = a.shape[0]
    deficit = np.diag(a) - (a.sum(axis=1) - np.diag(a))
    floor = -slack * max(float(np.max(np.abs(a), initial=0.0)), 1.0)
    if deficit.min(initial=0.0) < floor:
        raise PreconditionError(f"Matrix is not diagonally dominant (row deficit {deficit.min():.3e})")

    columns = []
    for i in range(d):
        for j in range(i + 1, d):
            if a[i, j] > 0:
                col = np.zeros(d)
                col[i] = col[j] = math.sqrt(a[i, j])
                columns.append(col)
    for i in range(d):
        if deficit[i] > 0:
            col = np.zeros(d)
            col[i] = math.sqrt(deficit[i])
            columns.append(col)

    b = np.column_stack(columns) if columns else np.zeros((d, 1))
    return CpFactorization(b)


def cp_rank2_embed(m: MatrixLike, tol: Tolerance = Tolerance()) -> CpFactorization:
    """
    CP factor of a DNN matrix of rank <= 2.

    The rows of a rank-2 Gram factor are planar vectors with pairwise
    angles at most pi/2; rotating the smallest arc containing them onto
    [0, pi/2] makes every coordinate nonnegative.

    Raises:
        NotDnnError: if m is not DNN
        RankTooHighError: if numerical rank > 2
    """
    a = as_array(m)
    _require_dnn(a, tol)
    rank = numerical_rank(a, tol)
    if rank > 2:
        raise RankTooHighError(f"Rank {rank} > 2")
    d = a.shape[0]
    if rank == 0:
        return CpFactorization(np.zeros((d, 1)))

    eigenvalues, vectors = sym_eig(a)
    factor = vectors[:, -rank:] * np.sqrt(np.maximum(eigenvalues[-rank:], 0.0))

    if rank == 1:
        col = factor[:, 0]
        col = -col if col.sum() < 0 else col
        b = col[:, None]
    else:
        radius = np.linalg.norm(factor, axis=1)
        live = radius > 1e-12 * radius.max()
        angles = np.mod(np.arctan2(factor[:, 1], factor[:, 0]), 2.0 * math.pi)
        ordered = np.sort(angles[live])
        gaps = np.diff(np.append(ordered, ordered[0] + 2.0 * math.pi))
        start = ordered[(int(np.argmax(gaps)) + 1) % ordered.size]
        rotated = np.mod(angles - start, 2.0 * math.pi)
        span = float(rotated[live].max())
        if span > math.pi / 2 + 1e-9:
            raise NotDnnError(f"Rank-2 rows span {span:.6f} rad > pi/2")
        rotated = np.minimum(rotated, math.pi / 2)
        b = np.column_stack([radius * np.cos(rotated), radius * np.sin(rotated)])
        b[~live] = 0.0

    b[(b < 0) & (b > -1e-9 * max(float(np.abs(b).max()), 1.0))] = 0.0
    factor = CpFactorization(b)
    if factor.residual(a) > _factor_tolerance(a):
        raise NumericalDegeneracyError(f"Rank-2 embedding residual {factor.residual(a):.3e}")
    return factor


def cp_d3_decompose(m: MatrixLike, tol: Tolerance = Tolerance()) -> CpFactorization:
    """
    Explicit CP factor of a 3x3 DNN matrix.

    For some ordering (a, b, c; b, d, e; c, e, f) of the rows, a > 0,
    ad - b^2 > 0 and ae - bc >= 0, and then

        v1 = (a, b, c) / sqrt(a)
        v2 = (0, ad - b^2, ae - bc) / sqrt(a (ad - b^2))
        v3 = (0, 0, sqrt(det / (ad - b^2)))

    Singular leading minors in every ordering mean rank <= 2, handled by
    cp_rank2_embed.
    """
    a = as_array(m)
    if a.shape != (3, 3):
        raise DimensionMismatchError(f"Expected a 3x3 matrix, got {a.shape}")
    _require_dnn(a, tol)

    scale = max(float(np.max(np.abs(a))), 1e-300)
    cut = tol.rank_cut * scale
    for perm in permutations(range(3)):
        p = a[np.ix_(perm, perm)]
        m11 = p[0, 0]
        m2 = p[0, 0] * p[1, 1] - p[0, 1] ** 2
        if m11 <= cut or m2 <= cut * scale:
            continue
        m13 = p[0, 0] * p[1, 2] - p[0, 1] * p[0, 2]
        if m13 < -tol.abs_eig * scale ** 2:
            continue
        det = max(float(linalg.det(p)), 0.0)
        local = np.column_stack([
            p[0] / math.sqrt(m11),
            np.array([0.0, m2, max(m13, 0.0)]) / math.sqrt(m11 * m2),
            np.array([0.0, 0.0, math.sqrt(det / m2)]),
        ])
        b = np.zeros((3, 3))
        b[list(perm)] = local
        factor = CpFactorization(b)
        if factor.residual(a) <= _factor_tolerance(a):
            logger.debug(f"3x3 factor from ordering {perm}")
            return factor

    if numerical_rank(a, tol) <= 2:
        logger.info("Degenerate 3x3 matrix, falling back to the rank-2 embedding")
        return cp_rank2_embed(a, tol)
    raise NumericalDegeneracyError("No row ordering gave a nonnegative 3x3 factor")


def _mu_run(a: np.ndarray, h: np.ndarray, iters: int, target: float) -> np.ndarray:
    """Damped symmetric multiplicative updates H <- H (1/2 + 1/2 (AH) / (H H^T H))."""
    last = np.inf
    for it in range(iters):
        numerator = a @ h
        denominator = h @ (h.T @ h) + MU_EPS
        h = h * (0.5 + 0.5 * numerator / denominator)
        if it % MU_CHECK_EVERY == 0:
            residual = float(np.linalg.norm(a - h @ h.T))
            if residual <= target or last - residual <= 1e-9 * last:
                break
            last = residual
    return h


def _polish(a: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Bounded least squares on the entries of H, starting from the MU result."""
    d, k = h.shape
    eye = np.eye(d)
    iu = np.triu_indices(d)

    def residual(x):
        b = x.reshape(d, k)
        return (b @ b.T - a)[iu]

    def jacobian(x):
        b = x.reshape(d, k)
        jac = np.einsum('ip,jq->ijpq', eye, b) + np.einsum('jp,iq->ijpq', eye, b)
        return jac[iu].reshape(len(iu[0]), d * k)

    result = least_squares(residual, h.ravel(), jac=jacobian, bounds=(0.0, np.inf), method='trf')
    return result.x.reshape(d, k)


def cp_search(
    m: MatrixLike,
    k: int,
    restarts: int = 8,
    iters: int = 2000,
    seed: Optional[int] = 0,
    tol: Tolerance = Tolerance(),
) -> Optional[CpFactorization]:
    """
    Heuristic search for a nonnegative d x k factor B with M = B B^T.

    Success means ||M - B B^T||_F <= 1e-7 (1 + ||M||_F); None means nothing
    was found, which says nothing about membership in the CP cone.

    Args:
        m: DNN matrix
        k: Number of columns of B
        restarts: Random starts
        iters: Multiplicative-update iterations per start
        seed: Seed for the random starts
    """
    if k < 1 or restarts < 1 or iters < 1:
        raise BadParamError(f"k, restarts and iters must be >= 1, got {k}, {restarts}, {iters}")
    a = as_array(m)
    _require_dnn(a, tol)
    d = a.shape[0]
    target = _factor_tolerance(a, SEARCH_RTOL)
    if not np.any(a):
        return CpFactorization(np.zeros((d, k)))

    rng = np.random.default_rng(seed)
    scale = math.sqrt(float(a.mean()) / k) if a.mean() > 0 else 1.0
    best = np.inf
    for attempt in range(restarts):
        h = rng.random((d, k)) * scale + 1e-3 * scale
        h = _mu_run(a, h, iters, target)
        h = _polish(a, h)
        residual = float(np.linalg.norm(a - h @ h.T))
        best = min(best, residual)
        if residual <= target:
            logger.info(f"CP factor with k={k} found on restart {attempt} (residual {residual:.3e})")
            return CpFactorization(np.maximum(h, 0.0))

    logger.debug(f"No CP factor with k={k} after {restarts} restarts (best residual {best:.3e})")
    return None
