"""
Range Criterion for DS States

A separable rho has product vectors |z>|z> in its range. For a DS state
that means y_i = |z_i|^2 satisfies

- w . y = 0 for every w in ker M(rho)
- y_i = 0 where p(i,i) = 0
- y_i y_j = 0 where p(i,j) = 0, i != j

If no nonzero y >= 0 meets all three, rho is entangled. Supports are
enumerated exhaustively; each maximal admissible support is decided by a
linear program.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg
from scipy.optimize import linprog

from core.errors import BadSubsetError, NotDnnError, SupportBudgetExceededError
from core.numerics.matcore import MatrixLike, Tolerance, as_array, is_psd, kernel_basis
from core.states.ds_state import DsState, MMatrix, Pair, m_matrix

logger = logging.getLogger(__name__)

# Components of an LP solution above this (relative) count as in the support
SUPPORT_RTOL = 1e-9


class RangeVerdict(Enum):
    INFEASIBLE = 'infeasible'
    FEASIBLE_WITNESS_VECTOR = 'feasible-witness-vector'


@dataclass
class RangeReport:
    """
    Outcome of the range test.

    kernel_basis holds one kernel vector of M per row. When the verdict is
    FEASIBLE_WITNESS_VECTOR, y is a nonnegative solution strictly positive
    exactly on feasible_support.
    """
    kernel_basis: np.ndarray
    zero_pairs: List[Pair]
    zero_diag: List[int]
    verdict: RangeVerdict
    feasible_support: Optional[Tuple[int, ...]] = None
    y: Optional[np.ndarray] = None
    supports_checked: int = 0
    subtracted: List[Tuple[float, Tuple[float, ...]]] = field(default_factory=list)

    @property
    def entangled(self) -> bool:
        return self.verdict == RangeVerdict.INFEASIBLE


def subtract_rank_one(m: MatrixLike, terms: Sequence[Tuple[float, Sequence[float]]]) -> MMatrix:
    """
    M - sum_t w_t v_t v_t^T.

    Raises:
        NegativeWeightError: if the result has a negative entry
    """
    a = as_array(m).copy()
    for weight, vector in terms:
        v = np.asarray(vector, dtype=float)
        a -= float(weight) * np.outer(v, v)
    # exact cancellations leave rounding noise
    a[np.abs(a) <= 1e-12 * max(float(np.abs(a).max(initial=0.0)), 1.0)] = 0.0
    return MMatrix(a)


def admissible_supports(d: int, zero_pairs: Sequence[Pair], zero_diag: Sequence[int]) -> List[Tuple[int, ...]]:
    """Maximal index sets avoiding zero_diag and containing no zero pair, in lexicographic order."""
    allowed = [i for i in range(d) if i not in set(zero_diag)]
    conflicts = {i: set() for i in allowed}
    for i, j in zero_pairs:
        if i in conflicts and j in conflicts:
            conflicts[i].add(j)
            conflicts[j].add(i)

    supports = []
    for mask in range(1, 1 << len(allowed)):
        chosen = [allowed[b] for b in range(len(allowed)) if mask >> b & 1]
        chosen_set = set(chosen)
        if any(conflicts[i] & chosen_set for i in chosen):
            continue
        extendable = any(
            i not in chosen_set and not conflicts[i] & chosen_set
            for i in allowed
        )
        if not extendable:
            supports.append(tuple(chosen))
    return sorted(supports)


def feasible_on_support(
    kernel: np.ndarray,
    support: Sequence[int],
    tol: Tolerance = Tolerance(),
    dim: Optional[int] = None,
) -> Optional[np.ndarray]:
    """
    y >= 0, strictly positive on support and zero elsewhere, with kernel @ y = 0.

    The kernel equations restricted to the support have nullspace N; an LP
    maximizes t subject to N c >= t and sum(N c) = |S|. A positive optimum
    gives y = N c.

    Args:
        kernel: Kernel vectors as rows (k x d, k may be 0)
        support: Nonempty index set
        dim: d when kernel has no rows and no columns

    Returns:
        y, or None when no such vector exists
    """
    support = sorted(set(int(i) for i in support))
    if not support:
        raise BadSubsetError("Support must be nonempty")
    kernel = np.atleast_2d(np.asarray(kernel, dtype=float))
    d = dim if dim is not None else kernel.shape[1]
    if support[0] < 0 or support[-1] >= d:
        raise BadSubsetError(f"Support {support} leaves 0..{d - 1}")

    y = np.zeros(d)
    if kernel.shape[0] == 0 or not np.any(kernel):
        y[support] = 1.0
        return y

    null = linalg.null_space(kernel[:, support], rcond=tol.rank_cut)
    r = null.shape[1]
    if r == 0:
        return None

    n_s = len(support)
    objective = np.zeros(r + 1)
    objective[-1] = -1.0
    a_ub = np.hstack([-null, np.ones((n_s, 1))])
    a_eq = np.append(null.sum(axis=0), 0.0)[None, :]
    result = linprog(
        objective, A_ub=a_ub, b_ub=np.zeros(n_s), A_eq=a_eq, b_eq=[float(n_s)],
        bounds=[(None, None)] * r + [(None, 1.0)], method='highs',
    )
    if not result.success or -result.fun <= tol.abs_eig:
        return None
    y[support] = null @ result.x[:r]
    return y


def _lp_support(kernel: np.ndarray, support: Tuple[int, ...]) -> Optional[Tuple[int, ...]]:
    """Positive support of some y >= 0, sum y = 1, kernel @ y = 0 on support."""
    n_s = len(support)
    a_eq = np.vstack([kernel[:, list(support)], np.ones((1, n_s))])
    b_eq = np.append(np.zeros(kernel.shape[0]), 1.0)
    result = linprog(np.zeros(n_s), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method='highs')
    if not result.success:
        return None
    y = result.x
    return tuple(i for i, v in zip(support, y) if v > SUPPORT_RTOL * y.max())


def range_criterion_test(
    rho: DsState,
    tol: Tolerance = Tolerance(),
    support_cap: int = 2 ** 16,
    projectors: Sequence[Tuple[float, Sequence[float]]] = (),
) -> RangeReport:
    """
    Decide whether a product vector |z>|z> compatible with range(rho) exists.

    Args:
        rho: PPT DS state
        tol: Kernel extraction uses tol.rank_cut
        support_cap: Limit on 2^(number of usable indices)
        projectors: Optional rank-1 terms (w, v) subtracted from M first

    Raises:
        NotDnnError: if rho (after subtraction) is not PPT
        SupportBudgetExceededError: if the enumeration would exceed support_cap
    """
    m = m_matrix(rho)
    if projectors:
        m = subtract_rank_one(m, projectors)
        logger.info(f"Subtracted {len(projectors)} rank-1 terms before the range test")
    if not is_psd(m, tol):
        raise NotDnnError("Range test needs a PPT state")

    a = m.array
    d = rho.d
    # a zero off-diagonal of M is a zero weight p(i,j)
    zero_pairs = [(i, j) for i in range(d) for j in range(i + 1, d) if a[i, j] == 0.0]
    zero_diag = [i for i in range(d) if a[i, i] == 0.0]
    allowed = d - len(zero_diag)
    if 2 ** allowed > support_cap:
        raise SupportBudgetExceededError(f"2^{allowed} supports exceed the cap {support_cap}")

    kernel = kernel_basis(a, tol).T
    report = RangeReport(
        kernel_basis=kernel,
        zero_pairs=zero_pairs,
        zero_diag=zero_diag,
        verdict=RangeVerdict.INFEASIBLE,
        subtracted=[(float(w), tuple(float(x) for x in v)) for w, v in projectors],
    )

    for support in admissible_supports(d, zero_pairs, zero_diag):
        report.supports_checked += 1
        positive = support if not kernel.shape[0] else _lp_support(kernel, support)
        if not positive:
            continue
        y = feasible_on_support(kernel, positive, tol, dim=d)
        if y is None:
            continue
        report.verdict = RangeVerdict.FEASIBLE_WITNESS_VECTOR
        report.feasible_support = positive
        report.y = y
        logger.info(f"Range test: feasible vector on support {positive}")
        return report

    logger.info(f"Range test infeasible over {report.supports_checked} maximal supports ({kernel.shape[0]} kernel vectors)")
    return report
