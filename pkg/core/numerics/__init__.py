"""
Symmetric-matrix numerics with an explicit tolerance policy.
"""
from .matcore import (
    SymMatrix,
    Tolerance,
    sym_eig,
    spectral_norm,
    is_psd,
    numerical_rank,
    pseudo_inverse,
    in_range,
    kernel_basis,
    partial_transpose,
    min_quad_over_simplex,
    project_to_simplex,
)

__all__ = [
    'SymMatrix',
    'Tolerance',
    'sym_eig',
    'spectral_norm',
    'is_psd',
    'numerical_rank',
    'pseudo_inverse',
    'in_range',
    'kernel_basis',
    'partial_transpose',
    'min_quad_over_simplex',
    'project_to_simplex',
]
