"""
Core Components for the DS Separability Certifier

This package contains the numerical machinery:
- numerics: Symmetric-matrix numerics with an explicit tolerance policy
- states: Diagonal symmetric bipartite states, separable decompositions,
  and the N-qubit PPT-entangled family
- certify: Cone membership tests, witnesses, the range criterion and the
  certify pipeline

Every verdict carries evidence that can be re-checked independently.
"""

__version__ = '1.0.0'
