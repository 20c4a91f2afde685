"""
Diagonal-Dominance Shift Certificates

A PPT DS state is separable when M minus a rank-one PSD shift is still
nonnegative and diagonally dominant:

- uniform shift:  M - eps * J,             J = all-ones
- weighted shift: M - lam * u_x u_x^T,     u_x = x / sum(x), x > 0

Each shift gives an interval of admissible values from three conditions
(entrywise nonnegativity, PSD of the remainder, diagonal dominance);
the certificate takes the midpoint.
"""

import logging
import math
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from core.certify.certificates import CpFactorization, UniformShiftCertificate, WeightedShiftCertificate
from core.certify.cones import dd_factorization, is_dnn
from core.errors import (
    BadParamError, DimensionMismatchError, DimensionTooSmallError, InfeasibleError,
    NotDnnError, PreconditionError, UNotInRangeError, UxNotInRangeError,
)
from core.numerics.matcore import Tolerance, in_range, pseudo_inverse
from core.states.ds_state import DsState, m_matrix

logger = logging.getLogger(__name__)

# Upper cap on lambda for the weighted shift
LAMBDA_CAP = 1.0 - 1e-12

# Margin reported for weights where the bounds cannot be evaluated
INFEASIBLE_MARGIN = -1e3


def _dnn_m(rho: DsState, tol: Tolerance) -> np.ndarray:
    m = m_matrix(rho)
    if not is_dnn(m, tol):
        raise NotDnnError("State is not PPT")
    return m.array


def _row_excess(a: np.ndarray) -> np.ndarray:
    """sum_{j != i} M_ij - M_ii per row."""
    return a.sum(axis=1) - 2.0 * np.diag(a)


def uniform_shift_bounds(a: np.ndarray, tol: Tolerance = Tolerance()) -> Dict[str, float]:
    """
    Bounds on eps for M - eps J.

    Returns:
        dict with 'nonnegativity' and 'psd' (upper bounds), 'dominance'
        (lower bound), and the resulting 'lower' and 'upper'
    """
    d = a.shape[0]
    if d < 3:
        raise DimensionTooSmallError(f"Uniform shift needs d >= 3, got d={d}")
    ones = np.ones(d)
    if not in_range(a, ones, tol):
        raise UNotInRangeError("The uniform vector is not in the range of M")

    quad = float(ones @ pseudo_inverse(a, tol).array @ ones)
    bounds = {
        'nonnegativity': float(a.min()),
        'psd': 1.0 / quad if quad > 0 else math.inf,
        'dominance': float(_row_excess(a).max()) / (d - 2),
    }
    bounds['lower'] = max(0.0, bounds['dominance'])
    bounds['upper'] = min(bounds['nonnegativity'], bounds['psd'])
    return bounds


def certify_uniform_shift(rho: DsState, tol: Tolerance = Tolerance()) -> UniformShiftCertificate:
    """
    Certify separability through M - eps J for the midpoint eps of [L, U].

    Raises:
        NotDnnError: if rho is not PPT
        DimensionTooSmallError: if d < 3
        UNotInRangeError: if the uniform vector is outside range(M)
        InfeasibleError: if L > U
    """
    a = _dnn_m(rho, tol)
    bounds = uniform_shift_bounds(a, tol)
    lower, upper = bounds['lower'], bounds['upper']
    if lower > upper:
        raise InfeasibleError(f"Uniform shift interval is empty: [{lower:.6g}, {upper:.6g}]", lower, upper)
    epsilon = (lower + upper) / 2.0
    logger.info(f"Uniform shift eps={epsilon:.6g} in [{lower:.6g}, {upper:.6g}]")
    return UniformShiftCertificate(epsilon=epsilon, interval=(lower, upper), bounds=bounds)


def verify_uniform_shift(
    rho: DsState,
    cert: UniformShiftCertificate,
    slack: float = 1e-9,
    tol: Tolerance = Tolerance(),
) -> bool:
    """Re-check the three conditions at cert.epsilon with an additive slack."""
    a = m_matrix(rho).array
    d = a.shape[0]
    eps = cert.epsilon
    ones = np.ones(d)
    if eps < -slack or d < 3 or not in_range(a, ones, tol):
        return False
    quad = float(ones @ pseudo_inverse(a, tol).array @ ones)
    return bool(
        eps <= a.min() + slack
        and eps * quad <= 1.0 + slack
        and np.all(-_row_excess(a) + eps * (d - 2) >= -slack)
    )


def uniform_shift_factorization(rho: DsState, cert: UniformShiftCertificate) -> CpFactorization:
    """B = [dd_factor(M - eps J), sqrt(eps) 1]."""
    a = m_matrix(rho).array
    d = a.shape[0]
    residual = dd_factorization(np.maximum(a - cert.epsilon, 0.0)).b
    return CpFactorization(np.column_stack([residual, math.sqrt(cert.epsilon) * np.ones(d)]))


def _normalized_weights(x: Sequence[float], d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (d,):
        raise DimensionMismatchError(f"Expected {d} weights, got {x.shape}")
    if not np.all(x > 0):
        raise PreconditionError(f"Weights must be strictly positive, got min {x.min():.3e}")
    return x


def weighted_shift_bounds(
    a: np.ndarray,
    x: np.ndarray,
    pinv: Optional[np.ndarray] = None,
    tol: Tolerance = Tolerance(),
) -> Dict[str, float]:
    """
    Bounds on lam for M - lam u_x u_x^T.

    Row i contributes lam * x_i (s - 2 x_i) <= s^2 (M_ii - sum_{j!=i} M_ij)
    rearranged: a lower bound when the coefficient is positive, an upper
    bound when negative, and infeasibility when zero with a positive
    right-hand side.
    """
    s = float(x.sum())
    u = x / s
    if not in_range(a, u, tol):
        raise UxNotInRangeError("u_x is not in the range of M")
    if pinv is None:
        pinv = pseudo_inverse(a, tol).array

    quad = float(u @ pinv @ u)
    excess = _row_excess(a) * s * s
    coef = x * (s - 2.0 * x)

    lowers, uppers = [0.0], [LAMBDA_CAP]
    for c, rhs in zip(coef, excess):
        if abs(c) <= 1e-15 * s * s:
            if rhs > 0:
                lowers.append(math.inf)
        elif c > 0:
            lowers.append(rhs / c)
        else:
            uppers.append(rhs / c)

    bounds = {
        'nonnegativity': float(np.min(a * s * s / np.outer(x, x))),
        'psd': 1.0 / quad if quad > 0 else math.inf,
        'dominance_lower': max(lowers),
        'dominance_upper': min(uppers),
    }
    bounds['lower'] = bounds['dominance_lower']
    bounds['upper'] = min(bounds['nonnegativity'], bounds['psd'], bounds['dominance_upper'])
    return bounds


def certify_weighted_shift(
    rho: DsState,
    x: Sequence[float],
    tol: Tolerance = Tolerance(),
) -> WeightedShiftCertificate:
    """
    Certify separability through M - lam u_x u_x^T for the midpoint of [L, U].

    Raises:
        NotDnnError: if rho is not PPT
        PreconditionError: if some x_i <= 0
        UxNotInRangeError: if u_x is outside range(M)
        InfeasibleError: if L > U or U <= 0
    """
    a = _dnn_m(rho, tol)
    x = _normalized_weights(x, rho.d)
    bounds = weighted_shift_bounds(a, x, tol=tol)
    lower, upper = bounds['lower'], bounds['upper']
    if lower > upper or upper <= 0:
        raise InfeasibleError(f"Weighted shift interval is empty: [{lower:.6g}, {upper:.6g}]", lower, upper)
    lam = (lower + upper) / 2.0
    logger.info(f"Weighted shift lambda={lam:.6g} in [{lower:.6g}, {upper:.6g}]")
    return WeightedShiftCertificate(x=tuple(float(v) for v in x), lam=lam, interval=(lower, upper), bounds=bounds)


def verify_weighted_shift(
    rho: DsState,
    cert: WeightedShiftCertificate,
    slack: float = 1e-9,
    tol: Tolerance = Tolerance(),
) -> bool:
    """Re-check nonnegativity, PSD and dominance of M - lam u_x u_x^T."""
    a = m_matrix(rho).array
    x = np.asarray(cert.x, dtype=float)
    if x.shape != (a.shape[0],) or not np.all(x > 0) or cert.lam < -slack:
        return False
    u = x / x.sum()
    if not in_range(a, u, tol):
        return False
    remainder = a - cert.lam * np.outer(u, u)
    quad = float(u @ pseudo_inverse(a, tol).array @ u)
    return bool(
        remainder.min() >= -slack
        and cert.lam * quad <= 1.0 + slack
        and np.all(-_row_excess(remainder) >= -slack)
    )


def weighted_shift_factorization(rho: DsState, cert: WeightedShiftCertificate) -> CpFactorization:
    """B = [dd_factor(M - lam u_x u_x^T), sqrt(lam) u_x]."""
    a = m_matrix(rho).array
    x = np.asarray(cert.x, dtype=float)
    u = x / x.sum()
    remainder = np.maximum(a - cert.lam * np.outer(u, u), 0.0)
    return CpFactorization(np.column_stack([dd_factorization(remainder).b, math.sqrt(cert.lam) * u]))


def _margin(a: np.ndarray, pinv: np.ndarray, x: np.ndarray, tol: Tolerance) -> float:
    try:
        bounds = weighted_shift_bounds(a, x, pinv, tol)
    except UxNotInRangeError:
        return INFEASIBLE_MARGIN
    if not math.isfinite(bounds['lower']):
        return INFEASIBLE_MARGIN
    return min(bounds['upper'] - bounds['lower'], bounds['upper'])


def search_weighted_shift(
    rho: DsState,
    restarts: int = 8,
    tol: Tolerance = Tolerance(),
    seed: Optional[int] = 0,
    max_iter: Optional[int] = None,
) -> Optional[WeightedShiftCertificate]:
    """
    Search positive weights x for a feasible weighted shift.

    Nelder-Mead maximizes U - L over x = |y| + 1e-6 normalized to sum 1,
    starting from the uniform vector, sqrt(diag M) and then random
    Dirichlet points.

    Returns:
        The first certificate found, or None
    """
    if restarts < 1:
        raise BadParamError(f"restarts must be >= 1, got {restarts}")
    a = _dnn_m(rho, tol)
    d = rho.d
    pinv = pseudo_inverse(a, tol).array
    rng = np.random.default_rng(seed)

    def to_weights(y: np.ndarray) -> np.ndarray:
        x = np.abs(y) + 1e-6
        return x / x.sum()

    starts = [np.ones(d) / d, np.sqrt(np.diag(a))]
    while len(starts) < restarts:
        starts.append(rng.dirichlet(np.ones(d)))

    best = INFEASIBLE_MARGIN
    for index, start in enumerate(starts[:max(restarts, 1)]):
        if not np.any(start):
            continue
        result = minimize(
            lambda y: -_margin(a, pinv, to_weights(y), tol),
            start / start.sum(),
            method='Nelder-Mead',
            options={'maxiter': max_iter or 400 * d, 'xatol': 1e-10, 'fatol': 1e-12},
        )
        for candidate in (start / start.sum(), result.x):
            x = to_weights(candidate)
            margin = _margin(a, pinv, x, tol)
            best = max(best, margin)
            if margin > 0:
                try:
                    cert = certify_weighted_shift(rho, x, tol)
                except InfeasibleError:
                    continue
                logger.info(f"Weighted shift found from start {index} (margin {margin:.3e})")
                return cert

    logger.debug(f"No weighted shift found (best margin {best:.3e})")
    return None
