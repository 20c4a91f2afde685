"""
Command-line front end

Subcommands:
- analyze:   certify a state file (DS bipartite or symmetric N-qubit)
- witness:   evaluate a lifted Horn witness on a DS state
- family:    build and analyse a member of the PPT-entangled N-qubit family
- decompose: write a verified product-vector decomposition
- example4:  analyse the four-qubit PPT-entangled example

Exit codes: 0 separable, 1 entangled, 2 inconclusive, 3 not certified,
64 usage or state-file error, 65 bad parameter or subset, 70 numerical failure.

Usage:
    python -m cli.main analyze states/example2.json --json
    python -m cli.main family --n 5 --z 1 --sigma 1 --report all
"""

import argparse
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from cli.report import certificate_report, dumps, range_report_dict, render_text, to_builtin
from cli.state_file import decomposition_to_dict, load_decomposition, load_state, state_to_dict
from config import Config
from core.certify.certificates import DecompositionEvidence, SeparabilityCertificate, Verdict
from core.certify.cones import cp_d3_decompose, cp_rank2_embed, cp_search, dd_factorization, is_diag_dominant
from core.certify.pipeline import CertifyBudget, certify, certify_nqubit
from core.certify.range_criterion import range_criterion_test, subtract_rank_one
from core.certify.witnesses import horn_matrix, lift_witness, witness_value
from core.errors import (
    BadCutError, BadParamError, BadSubsetError, NotCertifiedError, NumericalDegeneracyError,
    SeparabilityError, StateFileError,
)
from core.numerics.matcore import Tolerance
from core.states.decomp import SeparableDecomposition, verify_decomposition, zeta_decomposition
from core.states.ds_state import DsState, m_matrix, normalize
from core.states.multiqubit import (
    SymmetricNQubitState, example_4qubit, extremality_dimension, family_rho,
    is_ppt_all_bipartitions, ranks_frame, ranks_profile,
)

logger = logging.getLogger(__name__)

EXIT_CODES = {
    Verdict.SEPARABLE: 0,
    Verdict.ENTANGLED: 1,
    Verdict.INCONCLUSIVE: 2,
}
EXIT_NOT_CERTIFIED = 3
EXIT_USAGE = 64
EXIT_BAD_PARAM = 65
EXIT_NUMERICAL = 70


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting with status 2."""

    def error(self, message):
        raise UsageError(message)


def parse_projector(text: str) -> Tuple[float, Tuple[float, ...]]:
    """'w:v0,v1,...' with w possibly a fraction such as 3/16."""
    try:
        weight, vector = text.split(':', 1)
        return float(Fraction(weight.strip())), tuple(float(Fraction(v.strip())) for v in vector.split(','))
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"Invalid projector {text!r}, expected w:v0,v1,...") from e


def parse_subset(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(','))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"Invalid subset {text!r}, expected i,j,k,...") from e


def _common(parser: argparse.ArgumentParser):
    parser.add_argument('--json', action='store_true', help='Emit the report as JSON')
    parser.add_argument('--tol', type=float, help='Override abs_eig and rank_cut')
    parser.add_argument('--seed', type=int, help='Seed for randomized searches')
    parser.add_argument('--budget', type=int, help='Restarts for randomized searches')
    parser.add_argument('--timing', action='store_true', help='Include elapsed time in the report')
    parser.add_argument('--output', '-o', type=Path, help='Write the report to a file instead of stdout')
    parser.add_argument('--verbose', '-v', action='store_true', help='Log at INFO level')


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='sepcert', description='Separability certificates for diagonal symmetric states')
    sub = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)

    analyze = sub.add_parser('analyze', help='Certify a state file')
    analyze.add_argument('input', type=Path)
    analyze.add_argument('--normalize', action='store_true', help='Rescale weights to sum 1 first')
    analyze.add_argument('--projector', type=parse_projector, action='append', default=[],
                         help='Rank-1 term w:v0,v1,... subtracted before an extra range test (repeatable)')
    _common(analyze)

    witness = sub.add_parser('witness', help='Evaluate a lifted Horn witness')
    witness.add_argument('input', type=Path)
    witness.add_argument('--witness', choices=['horn'], default='horn')
    witness.add_argument('--subset', type=parse_subset, help='Target indices for the witness rows (default 0..4)')
    witness.add_argument('--projector', type=parse_projector, action='append', default=[],
                         help='Rank-1 term w:v0,v1,... subtracted from M first (repeatable)')
    witness.add_argument('--normalize', action='store_true')
    _common(witness)

    family = sub.add_parser('family', help='Analyse a member of the N-qubit family')
    family.add_argument('--n', type=int, required=True, help='Number of qubits (odd, >= 5)')
    family.add_argument('--z', type=float, required=True, help='Family parameter Z > 0')
    family.add_argument('--sigma', type=int, default=1, help='GHZ coherence sign (+1 or -1)')
    family.add_argument('--report', choices=['ranks', 'ppt', 'extremality', 'trace', 'blocks', 'all'], default='all')
    family.add_argument('--emit', type=Path, help='Write the state as a multiqubit state file')
    _common(family)

    decompose = sub.add_parser('decompose', help='Write a verified separable decomposition')
    decompose.add_argument('input', type=Path)
    decompose.add_argument('--method', choices=['auto', 'd3', 'rank2', 'dd', 'zeta'], default='auto')
    decompose.add_argument('--check', type=Path, help='Verify an existing decomposition file instead')
    decompose.add_argument('--normalize', action='store_true')
    _common(decompose)

    example4 = sub.add_parser('example4', help='Analyse the four-qubit PPT-entangled example')
    example4.add_argument('--emit', type=Path, help='Write the state as a multiqubit state file')
    _common(example4)
    return parser


def _tolerance(args) -> Tolerance:
    settings = Config.get_tolerance_config()
    if args.tol is not None:
        settings['abs_eig'] = settings['rank_cut'] = args.tol
    return Tolerance(**settings)


def _budget(args) -> CertifyBudget:
    budget = CertifyBudget.from_config()
    if args.seed is not None:
        budget.seed = args.seed
    if args.budget is not None:
        budget.restarts = args.budget
    return budget


def _emit(args, report: dict, text: Optional[str] = None):
    """Write the report as JSON or text to --output or stdout."""
    if args.json:
        text = dumps(report)
    elif text is None:
        text = render_text(report)
    if args.output:
        args.output.write_text(text + '\n')
    else:
        print(text)


def _load_ds(args) -> DsState:
    state = load_state(args.input)
    if not isinstance(state, DsState):
        raise BadParamError(f"{args.input} holds a multiqubit state; this command needs a bipartite DS state")
    return normalize(state) if getattr(args, 'normalize', False) else state


def cmd_analyze(args) -> int:
    tol = _tolerance(args)
    start = time.perf_counter()
    state = load_state(args.input)
    extra = {}
    if isinstance(state, SymmetricNQubitState):
        cert = certify_nqubit(state, tol)
        budget = None
    else:
        if args.normalize:
            state = normalize(state)
        budget = _budget(args)
        cert = certify(state, budget, tol)
        if args.projector:
            projected = range_criterion_test(state, tol, budget.support_cap, projectors=args.projector)
            extra['projected_range_test'] = range_report_dict(projected)
        budget = budget.to_dict()
    elapsed = time.perf_counter() - start if args.timing else None

    _emit(args, certificate_report(cert, tol, budget, elapsed, extra))
    return EXIT_CODES[cert.verdict]


def cmd_witness(args) -> int:
    tol = _tolerance(args)
    state = _load_ds(args)
    subset = args.subset or tuple(range(5))
    witness = lift_witness(horn_matrix(), state.d, subset)

    m = m_matrix(state)
    if args.projector:
        m = subtract_rank_one(m, args.projector)
    value = witness_value(witness, m)
    threshold = tol.abs_eig * max(1.0, float(np.abs(m.array).sum()))
    certifies = value < -threshold

    report = to_builtin({
        'witness': args.witness,
        'subset': subset,
        'projectors': args.projector,
        'value': value,
        'threshold': -threshold,
        'certifies_entanglement': certifies,
    })
    _emit(args, report, f"Tr(W M) = {value!r} on {subset}: " + ('entangled' if certifies else 'inconclusive'))
    return EXIT_CODES[Verdict.ENTANGLED] if certifies else EXIT_CODES[Verdict.INCONCLUSIVE]


def _nqubit_report(state: SymmetricNQubitState, sections: Sequence[str], tol: Tolerance) -> Tuple[dict, SeparabilityCertificate]:
    cert = certify_nqubit(state, tol)
    report = certificate_report(cert, tol)
    report['state'] = to_builtin(state_to_dict(state))
    if 'ppt' in sections:
        report['ppt_all_bipartitions'] = is_ppt_all_bipartitions(state, tol)
    if 'ranks' in sections:
        report['ranks'] = ranks_profile(state, tol)
    if 'extremality' in sections:
        report['extremality_dimension'] = extremality_dimension(state, tol)
    if 'blocks' in sections:
        report['blocks'] = to_builtin(ranks_frame(state, tol).to_dict(orient='records'))
    return report, cert


def cmd_family(args) -> int:
    tol = _tolerance(args)
    if args.n % 2 == 0:
        raise BadParamError(f"The family needs odd N, got {args.n} (use the example4 command for N=4)")
    start = time.perf_counter()
    state = family_rho(args.n, args.z, args.sigma)
    sections = ['ranks', 'ppt', 'extremality', 'trace', 'blocks'] if args.report == 'all' else [args.report]
    report, cert = _nqubit_report(state, sections, tol)

    if 'trace' in sections:
        k_half = (args.n - 1) // 2
        expected = 2.0 * (4.0 + args.z) ** k_half
        actual = state.unnormalized_trace()
        report['trace'] = {
            'unnormalized': actual,
            'expected': expected,
            'relative_error': abs(actual - expected) / expected,
        }
    if 'ranks' in sections:
        report['expected_ranks'] = [args.n + 1] + [2 * args.n] * (state.half - 1) + [2 * args.n - 1]
    if args.emit:
        args.emit.write_text(dumps(state_to_dict(state)) + '\n')
    if args.timing:
        report['timing'] = {'seconds': time.perf_counter() - start}
    _emit(args, report)
    return EXIT_CODES[cert.verdict]


def cmd_example4(args) -> int:
    tol = _tolerance(args)
    start = time.perf_counter()
    state = example_4qubit()
    report, cert = _nqubit_report(state, ['ranks', 'ppt', 'extremality', 'blocks'], tol)
    report['trace'] = {'normalized': state.trace()}
    if args.emit:
        args.emit.write_text(dumps(state_to_dict(state)) + '\n')
    if args.timing:
        report['timing'] = {'seconds': time.perf_counter() - start}
    _emit(args, report)
    return EXIT_CODES[cert.verdict]


def _decompose(state: DsState, method: str, budget: CertifyBudget, tol: Tolerance) -> SeparableDecomposition:
    """Decomposition by the requested route; NotCertifiedError when the route does not apply."""
    if method == 'auto':
        cert = certify(state, budget, tol)
        if not isinstance(cert.evidence, DecompositionEvidence):
            raise NotCertifiedError(f"No decomposition: verdict {cert.verdict.value}")
        return cert.evidence.decomposition

    m = m_matrix(state)
    try:
        if method == 'd3':
            factor = cp_d3_decompose(m, tol)
        elif method == 'rank2':
            factor = cp_rank2_embed(m, tol)
        elif method == 'dd':
            if not is_diag_dominant(m):
                raise NotCertifiedError("M is not diagonally dominant")
            factor = dd_factorization(m)
        else:
            factor = None
            for k in sorted({state.d, min(2 * state.d, budget.cp_max_k)}):
                factor = cp_search(m, k, budget.restarts, budget.iters, budget.seed, tol)
                if factor is not None:
                    break
            if factor is None:
                raise NotCertifiedError("CP factor search found nothing")
    except NotCertifiedError:
        raise
    except SeparabilityError as e:
        raise NotCertifiedError(f"Route {method} does not apply: {e}") from e

    decomposition = zeta_decomposition(factor, d_hint=state.d)
    return SeparableDecomposition(d=decomposition.d, terms=decomposition.terms, route=method)


def cmd_decompose(args) -> int:
    tol = _tolerance(args)
    state = _load_ds(args)

    if args.check:
        decomposition = load_decomposition(args.check)
        ok = verify_decomposition(state, decomposition, tol)
        _emit(
            args,
            {'verified': ok, 'terms': len(decomposition)},
            f"Decomposition {'verifies' if ok else 'does NOT verify'} ({len(decomposition)} terms)",
        )
        return 0 if ok else EXIT_NOT_CERTIFIED

    decomposition = _decompose(state, args.method, _budget(args), tol)
    if not verify_decomposition(state, decomposition, tol):
        raise NotCertifiedError("Decomposition failed re-verification")
    text = dumps(decomposition_to_dict(decomposition))
    if args.output:
        args.output.write_text(text + '\n')
        if not args.json:
            print(f"Wrote {len(decomposition)} product terms to {args.output}")
    else:
        print(text)
    return 0


COMMANDS = {
    'analyze': cmd_analyze,
    'witness': cmd_witness,
    'family': cmd_family,
    'decompose': cmd_decompose,
    'example4': cmd_example4,
}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"Usage error: {e}", file=sys.stderr)
        return EXIT_USAGE

    logging_config = Config.get_logging_config()
    if args.verbose:
        logging_config['level'] = 'INFO'
    logging.basicConfig(stream=sys.stderr, force=True, **logging_config)

    try:
        return COMMANDS[args.command](args)
    except StateFileError as e:
        logger.error(f"State file error: {e}")
        return EXIT_USAGE
    except NotCertifiedError as e:
        logger.error(f"Not certified: {e}")
        return EXIT_NOT_CERTIFIED
    except (BadParamError, BadSubsetError, BadCutError) as e:
        logger.error(f"Bad parameter: {e}")
        return EXIT_BAD_PARAM
    except (NumericalDegeneracyError, np.linalg.LinAlgError) as e:
        logger.error(f"Numerical failure: {e}")
        return EXIT_NUMERICAL
    except SeparabilityError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_BAD_PARAM


if __name__ == '__main__':
    sys.exit(main())
