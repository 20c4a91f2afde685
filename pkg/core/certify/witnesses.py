"""
Copositive Witnesses

A copositive W with Tr(W M) < 0 proves that M is not completely positive,
hence that the DS state is entangled. The Horn matrix (-1 on the edges of
the 5-cycle, +1 elsewhere) is the standard extreme copositive matrix that is
not PSD + nonnegative.
"""

import logging
from dataclasses import dataclass
from itertools import combinations, permutations
from math import comb
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.certify.certificates import Provenance, Witness
from core.errors import BadSubsetError, DimensionMismatchError
from core.numerics.matcore import MatrixLike, SymMatrix, Tolerance, as_array

logger = logging.getLogger(__name__)

HORN = np.array([
    [1, -1, 1, 1, -1],
    [-1, 1, -1, 1, 1],
    [1, -1, 1, -1, 1],
    [1, 1, -1, 1, -1],
    [-1, 1, 1, -1, 1],
], dtype=float)


def horn_matrix() -> Witness:
    return Witness(SymMatrix(HORN), Provenance.HORN, subset=tuple(range(5)))


def horn_orderings() -> List[Tuple[int, ...]]:
    """The 12 orderings of 0..4 that give distinct permuted Horn matrices (modulo dihedral symmetry)."""
    return [
        (0,) + rest for rest in permutations(range(1, 5))
        if rest[0] < rest[-1]
    ]


def lift_witness(w: Witness, d: int, subset: Sequence[int]) -> Witness:
    """
    Embed a k x k witness into d x d: row a of w lands on index subset[a].

    Zero-padding preserves copositivity.

    Raises:
        BadSubsetError: if subset has the wrong length, repeats or leaves 0..d-1
    """
    subset = tuple(int(i) for i in subset)
    if len(subset) != w.dim or len(set(subset)) != len(subset):
        raise BadSubsetError(f"Subset {subset} does not name {w.dim} distinct indices")
    if any(i < 0 or i >= d for i in subset):
        raise BadSubsetError(f"Subset {subset} leaves 0..{d - 1}")

    lifted = np.zeros((d, d))
    lifted[np.ix_(subset, subset)] = w.w.array
    provenance = Provenance.USER_SUPPLIED if w.provenance == Provenance.USER_SUPPLIED else Provenance.LIFTED_HORN
    return Witness(SymMatrix(lifted), provenance, subset=subset)


def witness_value(w: Witness, m: MatrixLike) -> float:
    """Tr(W M)."""
    a = as_array(m)
    if a.shape != (w.dim, w.dim):
        raise DimensionMismatchError(f"Witness of dim {w.dim} against a {a.shape} matrix")
    return float(np.sum(w.w.array * a))


@dataclass
class WitnessScan:
    witness: Optional[Witness]
    value: float
    examined: int


def _subsets(d: int, cap: int, rng: np.random.Generator):
    total = comb(d, 5)
    if total <= cap:
        yield from combinations(range(d), 5)
        return
    logger.info(f"{total} five-element subsets exceed the cap {cap}, sampling")
    seen = set()
    while len(seen) < cap:
        subset = tuple(sorted(int(i) for i in rng.choice(d, size=5, replace=False)))
        if subset not in seen:
            seen.add(subset)
            yield subset


def scan_horn_witnesses(
    m: MatrixLike,
    subset_cap: int = 2000,
    seed: Optional[int] = 0,
    tol: Tolerance = Tolerance(),
) -> WitnessScan:
    """
    Evaluate every lifted Horn ordering on 5-element subsets of indices.

    Subsets are enumerated exhaustively up to subset_cap and sampled beyond
    it. Only values below -abs_eig * max(1, ||M||_1) count.

    Returns:
        WitnessScan with the most negative qualifying witness (or None)
    """
    a = as_array(m)
    d = a.shape[0]
    if d < 5:
        return WitnessScan(witness=None, value=0.0, examined=0)

    threshold = -tol.abs_eig * max(1.0, float(np.abs(a).sum()))
    rng = np.random.default_rng(seed)
    orderings = horn_orderings()
    best_value, best_index = 0.0, None
    examined = 0
    for subset in _subsets(d, subset_cap, rng):
        block = a[np.ix_(subset, subset)]
        for order in orderings:
            value = float(np.sum(HORN * block[np.ix_(order, order)]))
            examined += 1
            if value < threshold and value < best_value:
                best_value = value
                best_index = tuple(subset[i] for i in order)

    if best_index is None:
        return WitnessScan(witness=None, value=best_value, examined=examined)
    witness = lift_witness(horn_matrix(), d, best_index)
    logger.info(f"Horn witness on {best_index}: Tr(W M) = {best_value:.6g}")
    return WitnessScan(witness=witness, value=best_value, examined=examined)
