"""
State models

Features:
- DS states and the matrix M(rho)
- Product-vector decompositions (zeta construction, I, I_x, sigma_xyz)
- Symmetric N-qubit states with GHZ coherence and the rho(Z) family
"""

from .ds_state import DsState, MMatrix, new_ds_state, normalize, m_matrix, from_m_matrix, full_density_matrix, pt_spectrum, is_ppt
from .decomp import SeparableDecomposition, zeta_decomposition, verify_decomposition, state_i, state_ix, sigma_xyz
from .multiqubit import SymmetricNQubitState, f_sequence, family_rho, example_4qubit

__all__ = [
    'DsState',
    'MMatrix',
    'new_ds_state',
    'normalize',
    'm_matrix',
    'from_m_matrix',
    'full_density_matrix',
    'pt_spectrum',
    'is_ppt',
    'SeparableDecomposition',
    'zeta_decomposition',
    'verify_decomposition',
    'state_i',
    'state_ix',
    'sigma_xyz',
    'SymmetricNQubitState',
    'f_sequence',
    'family_rho',
    'example_4qubit',
]
