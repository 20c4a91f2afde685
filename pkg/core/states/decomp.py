"""
Separable Decompositions of DS States

Constructive side of the CP correspondence:
- zeta_decomposition: turns a nonnegative factorization M = B B^T into an
  explicit mixture of symmetric product vectors |psi>|psi>
- state_i, state_ix, sigma_xyz: the extremal separable DS states
- sigma_xyz_decomposition: a 12-term decomposition of sigma_xyz
- verify_decomposition: independent reconstruction check
"""

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import List, Sequence

import numpy as np

from core.errors import AllZeroError, BadParamError, DimensionMismatchError, NegativeWeightError
from core.numerics.matcore import Tolerance
from core.states.ds_state import DsState, full_density_matrix, new_ds_state

logger = logging.getLogger(__name__)

# Relative residual allowed by verify_decomposition
RECONSTRUCTION_RTOL = 1e-8


@dataclass(frozen=True)
class ProductTerm:
    """One term w |psi><psi| (x) |psi><psi|."""
    weight: float
    ket: np.ndarray

    def __post_init__(self):
        if not self.weight > 0:
            raise NegativeWeightError(f"Decomposition weight must be > 0, got {self.weight}")


@dataclass
class SeparableDecomposition:
    """
    rho = sum_t w_t |psi_t><psi_t| (x) |psi_t><psi_t|

    Attributes:
        d: Local dimension
        terms: Product terms, kets of length d (complex)
        route: How the decomposition was produced
    """
    d: int
    terms: List[ProductTerm] = field(default_factory=list)
    route: str = 'zeta'

    def __len__(self):
        return len(self.terms)

    def weights(self) -> np.ndarray:
        return np.array([t.weight for t in self.terms])

    def kets(self) -> np.ndarray:
        if not self.terms:
            return np.zeros((0, self.d), dtype=complex)
        return np.vstack([t.ket for t in self.terms])

    def trace(self) -> float:
        """sum_t w_t ||psi_t||^4"""
        norms = np.sum(np.abs(self.kets()) ** 2, axis=1)
        return float(np.sum(self.weights() * norms ** 2))


def zeta_decomposition(b, d_hint: int = None) -> SeparableDecomposition:
    """
    Product-vector decomposition of the DS state whose M equals B B^T.

    For each column b_i, with z_l = sqrt(b_il) and omega = exp(i pi / d), emit

        zeta_{j,k} = sum_l (-1)^{k_l} omega^{j l} z_l |l>

    for j = 0..d-1 and sign patterns k in {0,1}^d. The sign average removes
    every coherence with an odd index count and the phase average removes the
    |ll><mm| terms, leaving exactly p_ll = b_l^2 and p_lm = 2 b_l b_m. Each
    term therefore carries weight 1 / (d 2^d).

    Args:
        b: CpFactorization or a nonnegative d x k array

    Returns:
        SeparableDecomposition
    """
    b = np.asarray(getattr(b, 'b', b), dtype=float)
    if b.ndim == 1:
        b = b[:, None]
    if np.any(b < 0):
        raise NegativeWeightError("Factor B must be entrywise nonnegative")

    d = b.shape[0]
    weight = 1.0 / (d * 2 ** d)
    omega_powers = np.exp(1j * np.pi / d * np.outer(np.arange(d), np.arange(d)))
    signs = np.array(list(product((1.0, -1.0), repeat=d)))

    terms = []
    for column in b.T:
        z = np.sqrt(column)
        if not np.any(z):
            continue
        for j in range(d):
            phased = omega_powers[j] * z
            for sign in signs:
                terms.append(ProductTerm(weight=weight, ket=sign * phased))

    logger.debug(f"zeta decomposition: {b.shape[1]} columns -> {len(terms)} terms")
    return SeparableDecomposition(d=d, terms=terms, route='zeta')


def decomposition_density_matrix(dec: SeparableDecomposition) -> np.ndarray:
    """Dense d^2 x d^2 matrix sum_t w_t |psi psi><psi psi|."""
    d = dec.d
    if not dec.terms:
        return np.zeros((d * d, d * d), dtype=complex)
    kets = dec.kets()
    doubled = np.einsum('ti,tj->tij', kets, kets).reshape(len(kets), d * d)
    return np.einsum('t,ta,tb->ab', dec.weights(), doubled, doubled.conj())


def verify_decomposition(rho: DsState, dec: SeparableDecomposition, tol: Tolerance = Tolerance()) -> bool:
    """
    Reconstruct the decomposition densely and compare with rho.

    Passes iff max |reconstruction - rho| <= 1e-8 (1 + trace rho).
    """
    if dec.d != rho.d:
        raise DimensionMismatchError(f"Decomposition has d={dec.d}, state has d={rho.d}")
    target = full_density_matrix(rho).array
    residual = float(np.max(np.abs(decomposition_density_matrix(dec) - target)))
    ok = residual <= RECONSTRUCTION_RTOL * (1.0 + rho.total_weight())
    if not ok:
        logger.info(f"Decomposition residual {residual:.3e} exceeds tolerance")
    return ok


def decomposition_to_state(dec: SeparableDecomposition) -> DsState:
    """Read the DS weights off a reconstructed decomposition."""
    rho = decomposition_density_matrix(dec).real
    d = dec.d
    p = {}
    for i in range(d):
        p[(i, i)] = max(rho[i * d + i, i * d + i], 0.0)
        for j in range(i + 1, d):
            p[(i, j)] = max(2.0 * rho[i * d + j, i * d + j], 0.0)
    return new_ds_state(d, p)


def state_i(d: int) -> DsState:
    """Unnormalized state with p_ii = 1, p_ij = 2, so M is the all-ones matrix."""
    if d < 2:
        raise BadParamError(f"Local dimension must be >= 2, got {d}")
    return new_ds_state(d, {(i, j): 1.0 if i == j else 2.0 for i in range(d) for j in range(i, d)})


def state_ix(x: Sequence[float]) -> DsState:
    """
    Normalized state with M = u_x u_x^T, u_x = x / ||x||_1.

    Raises:
        AllZeroError: if x vanishes
        NegativeWeightError: if x has a negative entry
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise NegativeWeightError(f"x must be entrywise nonnegative, got {x}")
    norm = float(np.sum(x))
    if norm == 0.0:
        raise AllZeroError("x must have a nonzero entry")
    u = x / norm
    d = u.size
    p = {(i, j): u[i] * u[i] if i == j else 2.0 * u[i] * u[j] for i in range(d) for j in range(i, d)}
    return new_ds_state(d, p, normalized=abs(sum(p.values()) - 1.0) <= 1e-9)


def sigma_xyz(x: complex, y: complex, z: complex) -> DsState:
    """Unnormalized d=3 state with p_ll = |v_l|^4 and p_lm = 2 |v_l|^2 |v_m|^2."""
    a = np.abs(np.array([x, y, z], dtype=complex)) ** 2
    return new_ds_state(3, {(i, j): a[i] ** 2 if i == j else 2.0 * a[i] * a[j] for i in range(3) for j in range(i, 3)})


def sigma_xyz_decomposition(x: complex, y: complex, z: complex) -> SeparableDecomposition:
    """
    Twelve product vectors (x, w^a y, w^2a z), w = exp(2 pi i / 3), a = 0, 1, 2,
    over the sign patterns (x,y,z), (-x,y,z), (x,-y,z), (x,y,-z); weight 1/12 each.
    """
    v = np.array([x, y, z], dtype=complex)
    if not np.any(v):
        raise AllZeroError("sigma_xyz needs a nonzero amplitude")
    w = np.exp(2j * np.pi / 3)
    flips = [np.ones(3), np.array([-1, 1, 1]), np.array([1, -1, 1]), np.array([1, 1, -1])]
    terms = [
        ProductTerm(weight=1.0 / 12.0, ket=flip * v * w ** (a * np.arange(3)))
        for flip in flips for a in range(3)
    ]
    return SeparableDecomposition(d=3, terms=terms, route='sigma_xyz')
