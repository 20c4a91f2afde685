"""
Dense Symmetric-Matrix Numerics

Everything the cone tests need from linear algebra, with one tolerance
policy shared by every predicate:
- SymMatrix: immutable dense symmetric matrix
- Tolerance: thresholds for PSD tests, numerical rank and kernels
- Eigendecomposition, PSD test, numerical rank, pseudo-inverse, range membership
- Partial transpose of a bipartite operator
- Heuristic minimization of a quadratic form over the simplex (copositivity evidence)
"""

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from core.errors import BadParamError, DimensionMismatchError, NotSymmetricError

logger = logging.getLogger(__name__)

# Relative residual allowed by the range-membership test
RANGE_RTOL = 1e-8


@dataclass(frozen=True)
class Tolerance:
    """
    Tolerance policy.

    A matrix m is PSD when its minimum eigenvalue is at least
    -(abs_eig + rel_scale * ||m||_2). Singular values at or below
    rank_cut * sigma_max count as zero.
    """
    abs_eig: float = 1e-9
    rel_scale: float = 1e-12
    rank_cut: float = 1e-9

    def __post_init__(self):
        for name in ('abs_eig', 'rel_scale', 'rank_cut'):
            value = getattr(self, name)
            if not value > 0:
                raise BadParamError(f"Tolerance.{name} must be > 0, got {value}")

    def psd_threshold(self, norm: float) -> float:
        return self.abs_eig + self.rel_scale * norm


class SymMatrix:
    """
    Immutable dense real symmetric matrix.

    Input is symmetrized as (a + a^T)/2, which makes entry(i, j) == entry(j, i)
    bit for bit. Inputs that are far from symmetric are rejected.
    """

    __slots__ = ('_a',)

    def __init__(self, entries):
        if isinstance(entries, SymMatrix):
            a = entries.array.copy()
        else:
            a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DimensionMismatchError(f"SymMatrix needs a non-empty square array, got shape {a.shape}")
        scale = 1.0 + float(np.max(np.abs(a)))
        asym = float(np.max(np.abs(a - a.T)))
        if asym > 1e-9 * scale:
            raise NotSymmetricError(f"Matrix is not symmetric (max |a - a^T| = {asym:.3e})")
        a = (a + a.T) / 2.0
        a.setflags(write=False)
        self._a = a

    @classmethod
    def identity(cls, dim: int) -> 'SymMatrix':
        return cls(np.eye(dim))

    @classmethod
    def zeros(cls, dim: int) -> 'SymMatrix':
        return cls(np.zeros((dim, dim)))

    @classmethod
    def diag(cls, values: Sequence[float]) -> 'SymMatrix':
        return cls(np.diag(np.asarray(values, dtype=float)))

    @classmethod
    def outer(cls, v: Sequence[float]) -> 'SymMatrix':
        v = np.asarray(v, dtype=float)
        return cls(np.outer(v, v))

    @property
    def dim(self) -> int:
        return self._a.shape[0]

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the entries."""
        return self._a

    def entry(self, i: int, j: int) -> float:
        return float(self._a[i, j])

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self._a))

    def __array__(self, dtype=None, copy=None):
        return np.array(self._a, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return self._a.shape == other._a.shape and bool(np.array_equal(self._a, other._a))

    def __hash__(self):
        return hash(self._a.tobytes())

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


MatrixLike = Union[SymMatrix, np.ndarray]


def as_array(m: MatrixLike) -> np.ndarray:
    return m.array if isinstance(m, SymMatrix) else np.asarray(m, dtype=float)


def sym_eig(m: MatrixLike) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigendecomposition of a symmetric matrix.

    Returns:
        (eigenvalues ascending, orthonormal eigenvectors as columns)
    """
    return linalg.eigh(as_array(m))


def spectral_norm(m: MatrixLike) -> float:
    a = as_array(m)
    if not a.size:
        return 0.0
    return float(np.max(np.abs(linalg.eigvalsh(a))))


def is_psd(m: MatrixLike, tol: Tolerance = Tolerance()) -> bool:
    """True iff min eigenvalue >= -(abs_eig + rel_scale * ||m||_2)."""
    eigenvalues = linalg.eigvalsh(as_array(m))
    norm = float(np.max(np.abs(eigenvalues)))
    return bool(eigenvalues[0] >= -tol.psd_threshold(norm))


def numerical_rank(m: MatrixLike, tol: Tolerance = Tolerance()) -> int:
    """Count of singular values above rank_cut * sigma_max (0 for the zero matrix)."""
    s = linalg.svdvals(as_array(m))
    if not s.size or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol.rank_cut * s[0]))


def _significant(eigenvalues: np.ndarray, tol: Tolerance) -> np.ndarray:
    top = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    if top == 0.0:
        return np.zeros(eigenvalues.shape, dtype=bool)
    return np.abs(eigenvalues) > tol.rank_cut * top


def pseudo_inverse(m: MatrixLike, tol: Tolerance = Tolerance()) -> SymMatrix:
    """
    Moore-Penrose pseudo-inverse via the eigendecomposition.

    Eigenvalues at or below rank_cut (relative) are treated as exact zeros.
    """
    eigenvalues, vectors = sym_eig(m)
    keep = _significant(eigenvalues, tol)
    inv = np.zeros_like(eigenvalues)
    inv[keep] = 1.0 / eigenvalues[keep]
    return SymMatrix((vectors * inv) @ vectors.T)


def in_range(m: MatrixLike, v: Sequence[float], tol: Tolerance = Tolerance()) -> bool:
    """True iff ||(I - m m^+) v||_2 <= 1e-8 ||v||_2."""
    a = as_array(m)
    v = np.asarray(v, dtype=float)
    if v.shape != (a.shape[0],):
        raise DimensionMismatchError(f"Vector of length {v.shape} for a {a.shape[0]}x{a.shape[0]} matrix")
    projected = a @ (pseudo_inverse(a, tol).array @ v)
    return bool(np.linalg.norm(v - projected) <= RANGE_RTOL * np.linalg.norm(v))


def kernel_basis(m: MatrixLike, tol: Tolerance = Tolerance()) -> np.ndarray:
    """
    Orthonormal basis of the numerical kernel, one vector per column.

    Uses the same relative cutoff as numerical_rank.
    """
    a = as_array(m)
    eigenvalues, vectors = sym_eig(a)
    return vectors[:, ~_significant(eigenvalues, tol)]


def partial_transpose(m: MatrixLike, dim_a: int, dim_b: int) -> SymMatrix:
    """
    Partial transpose on the second factor of C^dim_a (x) C^dim_b.

    Index convention: row (i, j) is stored at i * dim_b + j.
    """
    a = as_array(m)
    if a.shape != (dim_a * dim_b, dim_a * dim_b):
        raise DimensionMismatchError(f"Matrix of shape {a.shape} is not {dim_a}x{dim_b} bipartite")
    blocks = a.reshape(dim_a, dim_b, dim_a, dim_b)
    return SymMatrix(blocks.transpose(0, 3, 2, 1).reshape(dim_a * dim_b, dim_a * dim_b))


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = 1} (sort-based)."""
    n = v.size
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.nonzero(u - css / np.arange(1, n + 1) > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def _simplex_starts(n: int, restarts: int, rng: np.random.Generator) -> np.ndarray:
    vertices = np.eye(n)
    midpoints = [(vertices[i] + vertices[j]) / 2.0 for i, j in combinations(range(n), 2)]
    random = rng.dirichlet(np.ones(n), size=restarts)
    return np.vstack([vertices] + midpoints + [random]) if midpoints else np.vstack([vertices, random])


def min_quad_over_simplex(
    q: MatrixLike,
    restarts: int = 16,
    iters: int = 500,
    seed: Optional[int] = 0,
) -> Tuple[float, np.ndarray]:
    """
    Heuristic minimum of x^T q x over the standard simplex.

    Projected gradient descent from every vertex, every edge midpoint and
    `restarts` random points. The value is attained at the returned point,
    so it is an upper bound on the true minimum, never a lower bound.

    Args:
        q: Symmetric matrix
        restarts: Number of random simplex starts (>= 1)
        iters: Descent steps per start (>= 1)
        seed: Seed for the random starts

    Returns:
        (value, argmin)
    """
    if restarts < 1 or iters < 1:
        raise BadParamError(f"restarts and iters must be >= 1, got {restarts}, {iters}")

    a = as_array(q)
    n = a.shape[0]
    rng = np.random.default_rng(seed)
    lipschitz = 2.0 * spectral_norm(a)
    step = 1.0 / lipschitz if lipschitz > 0 else 0.0

    best_value, best_x = np.inf, None
    for x in _simplex_starts(n, restarts, rng):
        candidates = [x]
        for _ in range(iters):
            nxt = project_to_simplex(x - step * 2.0 * (a @ x))
            if np.allclose(nxt, x, rtol=0.0, atol=1e-15):
                break
            x = nxt
        candidates.append(x)
        for c in candidates:
            value = float(c @ a @ c)
            if value < best_value:
                best_value, best_x = value, c

    logger.debug(f"Simplex minimum {best_value:.3e} over {n} coordinates")
    return best_value, best_x
