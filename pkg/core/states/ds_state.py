"""
Diagonal Symmetric Bipartite States

A DS state on C^d (x) C^d is diagonal in the basis {|ii>, |D_ij>} with
|D_ij> = (|ij> + |ji>)/sqrt(2):

    rho = sum_i p_ii |ii><ii| + sum_{i<j} p_ij |D_ij><D_ij|

The weights are carried by the d x d matrix M(rho) with M_ii = p_ii and
M_ij = p_ij / 2. The partial transpose of rho is the direct sum of M(rho)
and the 1x1 blocks p_ij / 2 (each twice), so rho is PPT iff M(rho) is PSD.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Tuple

import numpy as np

from core.errors import BadIndexError, BadNormalizationError, BadParamError, NegativeWeightError
from core.numerics.matcore import SymMatrix, Tolerance, is_psd, partial_transpose, sym_eig

logger = logging.getLogger(__name__)

# Allowed deviation of sum(p) from 1 for states declared normalized
NORMALIZATION_TOL = 1e-9

Pair = Tuple[int, int]


class MMatrix(SymMatrix):
    """The entrywise nonnegative symmetric matrix M(rho)."""

    __slots__ = ()

    def __init__(self, entries):
        super().__init__(entries)
        if np.any(self.array < 0):
            i, j = np.unravel_index(int(np.argmin(self.array)), self.array.shape)
            raise NegativeWeightError(f"M({i},{j}) = {self.array[i, j]} is negative")

    @property
    def inner(self) -> SymMatrix:
        return SymMatrix(self.array)

    def entrywise_l1(self) -> float:
        return float(np.sum(np.abs(self.array)))


@dataclass(frozen=True)
class DsState:
    """
    Bipartite diagonal symmetric state.

    Attributes:
        d: Local dimension (>= 2)
        weights: Nonzero weights keyed by (i, j) with i <= j
        normalized: Whether the weights were declared to sum to 1
    """
    d: int
    weights: Mapping[Pair, float] = field(default_factory=dict)
    normalized: bool = False

    def p(self, i: int, j: int) -> float:
        """Weight of the pair {i, j}; order does not matter."""
        if i > j:
            i, j = j, i
        return self.weights.get((i, j), 0.0)

    def total_weight(self) -> float:
        return float(sum(self.weights.values()))

    def pairs(self) -> List[Pair]:
        return [(i, j) for i in range(self.d) for j in range(i, self.d)]

    def zero_pairs(self) -> List[Pair]:
        """Off-diagonal pairs with zero weight."""
        return [(i, j) for i, j in self.pairs() if i < j and self.p(i, j) == 0.0]

    def zero_diagonal(self) -> List[int]:
        return [i for i in range(self.d) if self.p(i, i) == 0.0]

    def __repr__(self):
        return f"DsState(d={self.d}, nonzero={len(self.weights)}, normalized={self.normalized})"


@dataclass(frozen=True)
class PtSpectrumReport:
    """Spectrum of the partial transpose in its block form."""
    m_eigenvalues: List[float]
    singleton_blocks: List[Tuple[float, int]]

    def all_eigenvalues(self) -> np.ndarray:
        """Sorted multiset of all d^2 eigenvalues."""
        values = list(self.m_eigenvalues)
        for value, multiplicity in self.singleton_blocks:
            values.extend([value] * multiplicity)
        return np.sort(np.asarray(values))

    @property
    def min_eigenvalue(self) -> float:
        return float(self.all_eigenvalues()[0])


def new_ds_state(d: int, p: Mapping[Pair, float], normalized: bool = False) -> DsState:
    """
    Build a validated DS state.

    Args:
        d: Local dimension (>= 2)
        p: Map (i, j) -> weight with 0 <= i <= j < d; missing pairs are 0
        normalized: Require the weights to sum to 1 (within 1e-9)

    Returns:
        DsState

    Raises:
        NegativeWeightError, BadNormalizationError, BadIndexError
    """
    if d < 2:
        raise BadParamError(f"Local dimension must be >= 2, got {d}")

    weights: Dict[Pair, float] = {}
    for key, value in p.items():
        i, j = key
        if not (0 <= i <= j < d):
            raise BadIndexError(f"Weight key ({i},{j}) outside 0 <= i <= j < {d}")
        value = float(value)
        if value < 0 or math.isnan(value):
            raise NegativeWeightError(f"p({i},{j}) = {value} is negative")
        if value != 0.0:
            weights[(i, j)] = value

    total = sum(weights.values())
    if normalized and abs(total - 1.0) > NORMALIZATION_TOL:
        raise BadNormalizationError(f"Weights sum to {total!r}, expected 1")

    return DsState(d=d, weights=weights, normalized=normalized)


def normalize(rho: DsState) -> DsState:
    """Rescale the weights to sum to 1."""
    total = rho.total_weight()
    if total <= 0:
        raise BadNormalizationError("Cannot normalize a state with zero total weight")
    return new_ds_state(rho.d, {k: v / total for k, v in rho.weights.items()}, normalized=True)


def m_matrix(rho: DsState) -> MMatrix:
    """M(rho): M_ii = p_ii, M_ij = M_ji = p_ij / 2."""
    a = np.zeros((rho.d, rho.d))
    for (i, j), value in rho.weights.items():
        if i == j:
            a[i, i] = value
        else:
            a[i, j] = a[j, i] = value / 2.0
    return MMatrix(a)


def from_m_matrix(m, normalized: bool = False) -> DsState:
    """
    Inverse of m_matrix: p_ii = M_ii, p_ij = 2 M_ij.

    Raises:
        NegativeWeightError: if any entry of m is negative
    """
    a = m.array if isinstance(m, SymMatrix) else np.asarray(m, dtype=float)
    if np.any(a < 0):
        raise NegativeWeightError(f"M has a negative entry ({a.min()})")
    d = a.shape[0]
    p = {}
    for i in range(d):
        for j in range(i, d):
            p[(i, j)] = a[i, i] if i == j else 2.0 * a[i, j]
    return new_ds_state(d, p, normalized=normalized)


def full_density_matrix(rho: DsState) -> SymMatrix:
    """
    The d^2 x d^2 density matrix in the product basis, row (i, j) at i*d + j.
    """
    d = rho.d
    out = np.zeros((d * d, d * d))
    for (i, j), value in rho.weights.items():
        if i == j:
            out[i * d + i, i * d + i] = value
        else:
            ij, ji = i * d + j, j * d + i
            out[np.ix_([ij, ji], [ij, ji])] = value / 2.0
    return SymMatrix(out)


def pt_spectrum(rho: DsState, tol: Tolerance = Tolerance()) -> PtSpectrumReport:
    """Eigenvalues of the partial transpose from its block form."""
    eigenvalues, _ = sym_eig(m_matrix(rho))
    singletons = [
        (rho.p(i, j) / 2.0, 2)
        for i in range(rho.d) for j in range(i + 1, rho.d)
    ]
    return PtSpectrumReport(m_eigenvalues=[float(v) for v in eigenvalues], singleton_blocks=singletons)


def explicit_pt_spectrum(rho: DsState) -> np.ndarray:
    """Sorted eigenvalues of the dense d^2 x d^2 partial transpose."""
    pt = partial_transpose(full_density_matrix(rho), rho.d, rho.d)
    return np.sort(sym_eig(pt)[0])


def is_ppt(rho: DsState, tol: Tolerance = Tolerance()) -> bool:
    """PPT iff M(rho) is PSD (nonnegativity holds by construction)."""
    return is_psd(m_matrix(rho), tol)


def is_extremal_separable_candidate(rho: DsState, tol: Tolerance = Tolerance()) -> bool:
    """True iff p_ij == 2 sqrt(p_ii p_jj) for all i < j, i.e. M(rho) is rank-1 nonnegative."""
    for i in range(rho.d):
        for j in range(i + 1, rho.d):
            if abs(rho.p(i, j) - 2.0 * math.sqrt(rho.p(i, i) * rho.p(j, j))) > tol.abs_eig:
                return False
    return True
