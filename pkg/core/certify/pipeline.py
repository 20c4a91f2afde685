"""
Certification Pipeline

Runs the separability tests cheapest-first and stops at the first
conclusive one:

1. PPT test (NPT means entangled)
2. d <= 4: explicit factors for d = 2, 3; opportunistic factor or citation for d = 4
3. rank <= 2 embedding
4. diagonal dominance
5. uniform shift
6. weighted shift search
7. CP factor search
8. lifted Horn witnesses
9. range criterion

Separable verdicts carry a product-vector decomposition whenever one was
constructed, and every decomposition is re-verified against the dense
density matrix before it is returned. Sub-step failures become Attempt
records; certify itself does not raise.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Callable, List, Optional

import numpy as np

from config import Config
from core.certify.certificates import (
    Attempt, Citation, CitationEvidence, CpFactorization, DecompositionEvidence,
    ExtremalPptEvidence, NptEvidence, RangeEvidence, SeparabilityCertificate,
    TraceEvidence, Verdict, WitnessEvidence,
)
from core.certify.cones import cp_d3_decompose, cp_rank2_embed, cp_search, dd_factorization, is_diag_dominant
from core.certify.dominance import (
    certify_uniform_shift, search_weighted_shift, uniform_shift_factorization,
    verify_uniform_shift, verify_weighted_shift, weighted_shift_factorization,
)
from core.certify.range_criterion import range_criterion_test
from core.certify.witnesses import scan_horn_witnesses
from core.errors import SeparabilityError
from core.numerics.matcore import Tolerance, is_psd, min_quad_over_simplex, numerical_rank, sym_eig
from core.states.decomp import SeparableDecomposition, verify_decomposition, zeta_decomposition
from core.states.ds_state import DsState, m_matrix, pt_spectrum
from core.states.multiqubit import (
    SymmetricNQubitState, dense_partial_transpose, extremality_dimension, pt_blocks, ranks_profile,
)

logger = logging.getLogger(__name__)


@dataclass
class CertifyBudget:
    """Search budgets for the heuristic steps."""
    seed: int = 0
    restarts: int = 8
    iters: int = 2000
    cp_max_k: int = 20
    witness_subset_cap: int = 2000
    support_cap: int = 2 ** 16

    @classmethod
    def from_config(cls) -> 'CertifyBudget':
        return cls(**Config.get_budget_config())

    def to_dict(self) -> dict:
        return asdict(self)


class _Run:
    """Shared state of one certify call."""

    def __init__(self, rho: DsState, budget: CertifyBudget, tol: Tolerance):
        self.rho = rho
        self.budget = budget
        self.tol = tol
        self.m = m_matrix(rho)
        self.trace: List[Attempt] = []

    def note(self, step: str, outcome: str, detail: str = ''):
        self.trace.append(Attempt(step=step, outcome=outcome, detail=detail))
        logger.debug(f"[{step}] {outcome} {detail}")

    def separable(self, step: str, factor: CpFactorization) -> Optional[SeparabilityCertificate]:
        """Turn a factor into a verified decomposition, or record why not."""
        decomposition = zeta_decomposition(factor, d_hint=self.rho.d)
        decomposition = SeparableDecomposition(d=decomposition.d, terms=decomposition.terms, route=step)
        if not verify_decomposition(self.rho, decomposition, self.tol):
            self.note(step, 'failed', 'decomposition did not reconstruct the state')
            return None
        self.note(step, 'separable', f'{len(decomposition)} product terms from a {factor.k}-column factor')
        return SeparabilityCertificate(
            verdict=Verdict.SEPARABLE,
            evidence=DecompositionEvidence(decomposition=decomposition, route=step, factor=factor),
            trace=self.trace,
        )

    def attempt(self, step: str, build: Callable[[], Optional[CpFactorization]]) -> Optional[SeparabilityCertificate]:
        try:
            factor = build()
        except SeparabilityError as e:
            self.note(step, 'skipped', str(e))
            return None
        except np.linalg.LinAlgError as e:
            logger.warning(f"[{step}] numerical failure: {e}")
            self.note(step, 'error', str(e))
            return None
        if factor is None:
            self.note(step, 'not-found')
            return None
        return self.separable(step, factor)


def _rank_two(run: _Run) -> Optional[CpFactorization]:
    return cp_rank2_embed(run.m, run.tol)


def _diag_dominant(run: _Run) -> Optional[CpFactorization]:
    if not is_diag_dominant(run.m):
        return None
    return dd_factorization(run.m)


def _uniform_shift(run: _Run) -> Optional[CpFactorization]:
    cert = certify_uniform_shift(run.rho, run.tol)
    if not verify_uniform_shift(run.rho, cert, tol=run.tol):
        logger.warning(f"Uniform shift eps={cert.epsilon:.6g} failed re-verification")
        return None
    return uniform_shift_factorization(run.rho, cert)


def _weighted_shift(run: _Run) -> Optional[CpFactorization]:
    cert = search_weighted_shift(run.rho, restarts=run.budget.restarts, tol=run.tol, seed=run.budget.seed)
    if cert is None:
        return None
    if not verify_weighted_shift(run.rho, cert, tol=run.tol):
        logger.warning(f"Weighted shift lambda={cert.lam:.6g} failed re-verification")
        return None
    return weighted_shift_factorization(run.rho, cert)


def _cp_search(run: _Run, ks: List[int]) -> Optional[CpFactorization]:
    for k in ks:
        factor = cp_search(run.m, k, restarts=run.budget.restarts, iters=run.budget.iters,
                           seed=run.budget.seed, tol=run.tol)
        if factor is not None:
            return factor
    return None


def _search_ks(d: int, cap: int) -> List[int]:
    return sorted({min(d, cap), min(2 * d, cap)})


def certify(
    rho: DsState,
    budget: Optional[CertifyBudget] = None,
    tol: Tolerance = Tolerance(),
) -> SeparabilityCertificate:
    """
    Decide separability of a DS state, or report what was tried.

    Args:
        rho: DS state (normalized or not)
        budget: Search budgets, defaults from CertifyBudget()
        tol: Numerical tolerances

    Returns:
        SeparabilityCertificate with the verdict, its evidence and the trace
    """
    budget = budget or CertifyBudget()
    run = _Run(rho, budget, tol)
    d = rho.d
    logger.info(f"Certifying {rho!r}")

    if not is_psd(run.m, tol):
        min_eig = pt_spectrum(rho, tol).min_eigenvalue
        run.note('ppt', 'entangled', f'min eigenvalue {min_eig:.6g}')
        return SeparabilityCertificate(Verdict.ENTANGLED, NptEvidence(min_eigenvalue=min_eig), run.trace)
    run.note('ppt', 'passed')

    if rho.total_weight() == 0:
        run.note('zero-state', 'separable')
        return SeparabilityCertificate(
            Verdict.SEPARABLE,
            DecompositionEvidence(SeparableDecomposition(d=d, terms=[], route='zero-state'), route='zero-state'),
            run.trace,
        )

    if d == 2:
        cert = run.attempt('rank-two', lambda: _rank_two(run))
        if cert:
            return cert
    elif d == 3:
        cert = run.attempt('three-by-three', lambda: cp_d3_decompose(run.m, tol))
        if cert:
            return cert

    steps = [
        ('rank-two', lambda: _rank_two(run) if numerical_rank(run.m, tol) <= 2 else None),
        ('diag-dominant', lambda: _diag_dominant(run)),
    ]
    if d >= 5:
        steps += [
            ('uniform-shift', lambda: _uniform_shift(run)),
            ('weighted-shift', lambda: _weighted_shift(run)),
        ]
    steps.append(('cp-search', lambda: _cp_search(run, _search_ks(d, budget.cp_max_k))))

    for step, build in steps:
        cert = run.attempt(step, build)
        if cert:
            return cert

    if d <= 4:
        run.note('low-dimension', 'separable', 'PPT is sufficient for d <= 4')
        return SeparabilityCertificate(
            Verdict.SEPARABLE,
            CitationEvidence(Citation.LOW_DIMENSION, detail=f'PPT DS state with d={d}'),
            run.trace,
        )

    scan = scan_horn_witnesses(run.m, budget.witness_subset_cap, budget.seed, tol)
    if scan.witness is not None:
        block = scan.witness.w.array[np.ix_(scan.witness.subset, scan.witness.subset)]
        simplex_minimum, _ = min_quad_over_simplex(block, seed=budget.seed)
        run.note('horn-witness', 'entangled', f'Tr(W M) = {scan.value:.6g} on {scan.witness.subset}')
        return SeparabilityCertificate(
            Verdict.ENTANGLED,
            WitnessEvidence(witness=scan.witness, value=scan.value, simplex_minimum=simplex_minimum),
            run.trace,
        )
    run.note('horn-witness', 'not-found', f'{scan.examined} orderings examined')

    try:
        report = range_criterion_test(rho, tol, budget.support_cap)
    except SeparabilityError as e:
        run.note('range-criterion', 'skipped', str(e))
    else:
        if report.entangled:
            run.note('range-criterion', 'entangled', f'{report.supports_checked} supports infeasible')
            return SeparabilityCertificate(Verdict.ENTANGLED, RangeEvidence(report), run.trace)
        run.note('range-criterion', 'inconclusive', f'feasible on {report.feasible_support}')

    logger.info(f"No conclusive test for {rho!r}")
    return SeparabilityCertificate(Verdict.INCONCLUSIVE, TraceEvidence(list(run.trace)), run.trace)


def _min_pt_eigenvalue(state: SymmetricNQubitState, m_cut: int) -> float:
    if state.has_ghz_coherence:
        value = float(pt_blocks(state, m_cut).eigenvalues()[0])
    else:
        value = float(sym_eig(dense_partial_transpose(state, m_cut))[0][0])
    return value / state.normalization


def certify_nqubit(state: SymmetricNQubitState, tol: Tolerance = Tolerance()) -> SeparabilityCertificate:
    """
    Verdict for a symmetric N-qubit state.

    NPT across some cut means entangled. A PPT state of rank > 1 whose
    extremality dimension is 1 is extremal in the PPT set, hence entangled.
    Anything else is inconclusive.
    """
    trace: List[Attempt] = []
    eigenvalues = [_min_pt_eigenvalue(state, m) for m in range(1, state.half + 1)]
    worst = min(eigenvalues)
    norm = max(abs(v) for v in state.diag) / state.normalization
    if worst < -tol.psd_threshold(norm):
        cut = int(np.argmin(eigenvalues)) + 1
        trace.append(Attempt('ppt', 'entangled', f'cut m={cut}, min eigenvalue {worst:.6g}'))
        return SeparabilityCertificate(Verdict.ENTANGLED, NptEvidence(min_eigenvalue=worst), trace)
    trace.append(Attempt('ppt', 'passed'))

    ranks = ranks_profile(state, tol)
    dimension = extremality_dimension(state, tol)
    trace.append(Attempt('extremality', 'computed', f'ranks {ranks}, dimension {dimension}'))
    if dimension == 1 and ranks[0] > 1:
        logger.info(f"Extremal PPT state with ranks {ranks}")
        return SeparabilityCertificate(
            Verdict.ENTANGLED,
            ExtremalPptEvidence(ranks=ranks, extremality_dimension=dimension),
            trace,
        )
    return SeparabilityCertificate(Verdict.INCONCLUSIVE, TraceEvidence(list(trace)), trace)
