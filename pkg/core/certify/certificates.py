"""
Certificate records produced by the certify pipeline.

Each verdict carries one piece of evidence that can be re-checked without
trusting the code path that produced it.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Dict, List, Optional, Tuple, Union

import numpy as np

from core.errors import NegativeWeightError
from core.numerics.matcore import SymMatrix

if TYPE_CHECKING:
    from core.certify.range_criterion import RangeReport
    from core.states.decomp import SeparableDecomposition

# Entries in [CLAMP_FLOOR, 0) are clamped to zero
CLAMP_FLOOR = -1e-12


class Verdict(Enum):
    SEPARABLE = 'separable'
    ENTANGLED = 'entangled'
    INCONCLUSIVE = 'inconclusive'


class Citation(Enum):
    """Separability results that are cited rather than constructed."""
    LOW_DIMENSION = 'd<=4'
    RANK_AT_MOST_TWO = 'rank<=2'
    DIAGONALLY_DOMINANT = 'diag-dominant'
    UNIFORM_SHIFT = 'uniform-shift'
    WEIGHTED_SHIFT = 'weighted-shift'


class Provenance(Enum):
    HORN = 'horn'
    LIFTED_HORN = 'lifted-horn'
    USER_SUPPLIED = 'user-supplied'


@dataclass
class CpFactorization:
    """Entrywise nonnegative B with M = B B^T."""
    b: np.ndarray

    def __post_init__(self):
        b = np.array(self.b, dtype=float)
        if b.ndim == 1:
            b = b[:, None]
        if b.size and b.min() < CLAMP_FLOOR:
            raise NegativeWeightError(f"CP factor has entry {b.min():.3e} below {CLAMP_FLOOR}")
        self.b = np.maximum(b, 0.0)

    @property
    def k(self) -> int:
        return self.b.shape[1]

    def gram(self) -> np.ndarray:
        return self.b @ self.b.T

    def residual(self, m) -> float:
        """Frobenius residual ||m - B B^T||_F."""
        return float(np.linalg.norm(np.asarray(m, dtype=float) - self.gram()))


@dataclass(frozen=True)
class Witness:
    """Copositive matrix used as an entanglement witness."""
    w: SymMatrix
    provenance: Provenance = Provenance.USER_SUPPLIED
    subset: Optional[Tuple[int, ...]] = None

    @property
    def dim(self) -> int:
        return self.w.dim


@dataclass(frozen=True)
class UniformShiftCertificate:
    """
    M - eps * J is diagonally dominant and nonnegative (J = all-ones).

    bounds holds the value of every condition at the chosen epsilon.
    """
    epsilon: float
    interval: Tuple[float, float]
    bounds: Dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class WeightedShiftCertificate:
    """M - lambda * u_x u_x^T is diagonally dominant and nonnegative."""
    x: Tuple[float, ...]
    lam: float
    interval: Tuple[float, float]
    bounds: Dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class Attempt:
    """One pipeline step and what came of it."""
    step: str
    outcome: str
    detail: str = ''


@dataclass
class DecompositionEvidence:
    decomposition: 'SeparableDecomposition'
    route: str
    factor: Optional[CpFactorization] = None


@dataclass
class CitationEvidence:
    citation: Citation
    detail: str = ''


@dataclass
class WitnessEvidence:
    witness: Witness
    value: float
    simplex_minimum: Optional[float] = None


@dataclass
class NptEvidence:
    min_eigenvalue: float


@dataclass
class RangeEvidence:
    report: 'RangeReport'


@dataclass
class ExtremalPptEvidence:
    """PPT state that is extremal in the PPT set with rank > 1."""
    ranks: List[int]
    extremality_dimension: int


@dataclass
class TraceEvidence:
    attempts: List[Attempt]


Evidence = Union[
    DecompositionEvidence, CitationEvidence, WitnessEvidence, NptEvidence,
    RangeEvidence, ExtremalPptEvidence, TraceEvidence,
]


@dataclass
class SeparabilityCertificate:
    verdict: Verdict
    evidence: Evidence
    trace: List[Attempt] = field(default_factory=list)

    @property
    def is_separable(self) -> bool:
        return self.verdict == Verdict.SEPARABLE

    @property
    def is_entangled(self) -> bool:
        return self.verdict == Verdict.ENTANGLED
