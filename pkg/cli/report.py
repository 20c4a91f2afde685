"""
Certificate reports

Turns certificates into plain dicts for JSON output and into text for the
terminal. Floats keep Python's shortest round-trip repr, so a report read
back gives the same doubles.
"""

import json
import math
from dataclasses import asdict
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from cli.state_file import decomposition_to_dict
from core import __version__
from core.certify.certificates import (
    Attempt, CitationEvidence, DecompositionEvidence, ExtremalPptEvidence, NptEvidence,
    RangeEvidence, SeparabilityCertificate, TraceEvidence, WitnessEvidence,
)
from core.certify.range_criterion import RangeReport
from core.numerics.matcore import Tolerance


def to_builtin(value: Any) -> Any:
    """Recursively convert numpy scalars/arrays, tuples and non-finite floats to JSON-safe values."""
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_builtin(value.tolist())
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    return value


def range_report_dict(report: RangeReport) -> Dict[str, Any]:
    return {
        'verdict': report.verdict.value,
        'kernel_basis': report.kernel_basis,
        'zero_pairs': report.zero_pairs,
        'zero_diag': report.zero_diag,
        'feasible_support': report.feasible_support,
        'y': report.y,
        'supports_checked': report.supports_checked,
        'subtracted': report.subtracted,
    }


def evidence_dict(evidence) -> Dict[str, Any]:
    if isinstance(evidence, DecompositionEvidence):
        out = {'type': 'decomposition', 'route': evidence.route,
               'decomposition': decomposition_to_dict(evidence.decomposition)}
        if evidence.factor is not None:
            out['factor'] = evidence.factor.b
        return out
    if isinstance(evidence, CitationEvidence):
        return {'type': 'citation', 'citation': evidence.citation.value, 'detail': evidence.detail}
    if isinstance(evidence, WitnessEvidence):
        return {
            'type': 'witness',
            'provenance': evidence.witness.provenance.value,
            'subset': evidence.witness.subset,
            'value': evidence.value,
            'simplex_minimum': evidence.simplex_minimum,
            'matrix': evidence.witness.w.array,
        }
    if isinstance(evidence, NptEvidence):
        return {'type': 'npt', 'min_eigenvalue': evidence.min_eigenvalue}
    if isinstance(evidence, RangeEvidence):
        return {'type': 'range-criterion', 'report': range_report_dict(evidence.report)}
    if isinstance(evidence, ExtremalPptEvidence):
        return {'type': 'extremal-ppt', 'ranks': evidence.ranks,
                'extremality_dimension': evidence.extremality_dimension}
    if isinstance(evidence, TraceEvidence):
        return {'type': 'trace', 'attempts': [asdict(a) for a in evidence.attempts]}
    raise TypeError(f"Unknown evidence type {type(evidence).__name__}")


def certificate_report(
    cert: SeparabilityCertificate,
    tol: Tolerance,
    budget: Optional[dict] = None,
    timing: Optional[float] = None,
    extra: Optional[dict] = None,
) -> Dict[str, Any]:
    """JSON-ready report; timing is included only when given."""
    report = {
        'version': __version__,
        'verdict': cert.verdict.value,
        'evidence': evidence_dict(cert.evidence),
        'tolerance': asdict(tol),
        'trace': [asdict(a) for a in cert.trace],
    }
    if budget is not None:
        report['budget'] = budget
    if extra:
        report.update(extra)
    if timing is not None:
        report['timing'] = {'seconds': timing}
    return to_builtin(report)


def dumps(report: Dict[str, Any]) -> str:
    return json.dumps(to_builtin(report), indent=2)


def trace_frame(trace: List[Attempt]) -> pd.DataFrame:
    """Attempt trace as a table (step, outcome, detail)."""
    return pd.DataFrame([asdict(a) for a in trace], columns=['step', 'outcome', 'detail'])


def render_text(report: Dict[str, Any]) -> str:
    """Human-readable summary of a certificate report."""
    lines = [f"Verdict: {report['verdict'].upper()}"]
    evidence = report.get('evidence', {})
    kind = evidence.get('type')
    if kind == 'decomposition':
        terms = evidence['decomposition']['terms']
        lines.append(f"Evidence: {len(terms)} product terms via {evidence['route']}")
    elif kind == 'witness':
        lines.append(f"Evidence: {evidence['provenance']} witness on {evidence['subset']}, Tr(W M) = {evidence['value']}")
    elif kind == 'npt':
        lines.append(f"Evidence: partial transpose eigenvalue {evidence['min_eigenvalue']}")
    elif kind == 'citation':
        lines.append(f"Evidence: {evidence['citation']} ({evidence['detail']})")
    elif kind == 'range-criterion':
        lines.append(f"Evidence: range criterion infeasible over {evidence['report']['supports_checked']} supports")
    elif kind == 'extremal-ppt':
        lines.append(f"Evidence: extremal PPT, ranks {evidence['ranks']}")

    trace = report.get('trace') or []
    if trace:
        lines.append('')
        lines.append(trace_frame([Attempt(**a) for a in trace]).to_string(index=False))
    if 'timing' in report:
        lines.append(f"\nElapsed: {report['timing']['seconds']:.3f}s")
    return '\n'.join(lines)
