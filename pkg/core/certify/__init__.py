"""
Separability certification

- certify: staged pipeline for DS states
- certify_nqubit: NPT / extremal-PPT verdict for symmetric N-qubit states
- Cone tests, shift certificates, copositive witnesses and the range criterion
"""

from .certificates import SeparabilityCertificate, Verdict, Citation, Provenance, CpFactorization, Witness
from .pipeline import CertifyBudget, certify, certify_nqubit

__all__ = [
    'SeparabilityCertificate',
    'Verdict',
    'Citation',
    'Provenance',
    'CpFactorization',
    'Witness',
    'CertifyBudget',
    'certify',
    'certify_nqubit',
]
