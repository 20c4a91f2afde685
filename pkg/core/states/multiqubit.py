"""
Symmetric N-Qubit States with GHZ Coherence

States of the form

    rho = (sum_k lam'_k |D^k><D^k| + sigma (|D^a><D^b| + |D^b><D^a|)) / normalization

in the Dicke basis, with the coherence usually between |D^0> and |D^N>.

Features:
- f_sequence: the three-term recurrence f_{k+2} = (2+Z) f_{k+1} - f_k and its closed form
- family_rho: the PPT-entangled family with lam'_k = C(N,k) f_{K-k}, N = 2K+1
- pt_blocks: partial transpose across m : N-m qubits as D H D Hankel blocks
- block_cholesky: explicit rank-2 factorization of the Hankel cores
- ranks_profile / extremality_dimension: the rank and extremality tests

Partial transposes are built in the (m+1) x (N-m+1) symmetric bipartite
representation; the 2^N space is never formed.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import linalg
from scipy.special import comb

from core.errors import BadCutError, BadParamError, NegativeWeightError, NumericalDegeneracyError
from core.numerics.matcore import (
    SymMatrix, Tolerance, is_psd, kernel_basis, numerical_rank, partial_transpose, sym_eig,
)

logger = logging.getLogger(__name__)

# Closed form vs recurrence, relative
CLOSED_FORM_RTOL = 1e-9


def _binom(n: int, k: int) -> float:
    return float(comb(n, k, exact=True)) if 0 <= k <= n else 0.0


@dataclass(frozen=True)
class FSequence:
    """
    f_0 = 1, f_1 = 1 + Z, f_{k+2} = (2+Z) f_{k+1} - f_k.

    Negative indices follow the reflection f_p = f_{-p-1}.
    """
    z_param: float
    values: Tuple[float, ...]
    alpha: float
    beta: float

    def closed_form(self, k: int) -> float:
        a, b = self.alpha, self.beta
        return (a - 1.0) / (a - b) * a ** k - (b - 1.0) / (a - b) * b ** k

    def at(self, k: int) -> float:
        if k < 0:
            return self.at(-k - 1)
        if k < len(self.values):
            return self.values[k]
        prev, cur = self.values[-2], self.values[-1]
        for _ in range(len(self.values), k + 1):
            prev, cur = cur, (2.0 + self.z_param) * cur - prev
        return cur

    def i_ab(self, a: int, b: int, base: int) -> float:
        """I_ab = f_m f_{m+a+b} - f_{m+a} f_{m+b} at m = base."""
        return self.at(base) * self.at(base + a + b) - self.at(base + a) * self.at(base + b)

    def max_closed_form_error(self) -> float:
        return max(
            abs(v - self.closed_form(k)) / abs(v)
            for k, v in enumerate(self.values)
        )


def f_sequence(z_param: float, count: int) -> FSequence:
    """
    f_0..f_count by recurrence, cross-checked against the closed form.

    Raises:
        BadParamError: if Z <= 0 or count < 1
    """
    if not z_param > 0:
        raise BadParamError(f"Z must be > 0, got {z_param}")
    if count < 1:
        raise BadParamError(f"count must be >= 1, got {count}")

    values = [1.0, 1.0 + z_param]
    for _ in range(2, count + 1):
        values.append((2.0 + z_param) * values[-1] - values[-2])

    root = math.sqrt(z_param * (4.0 + z_param))
    seq = FSequence(
        z_param=z_param,
        values=tuple(values[:count + 1]),
        alpha=(2.0 + z_param + root) / 2.0,
        beta=(2.0 + z_param - root) / 2.0,
    )
    error = seq.max_closed_form_error()
    if error > CLOSED_FORM_RTOL:
        raise NumericalDegeneracyError(f"Recurrence and closed form disagree (rel. error {error:.3e}) at Z={z_param}")
    return seq


@dataclass(frozen=True)
class SymmetricNQubitState:
    """
    Diagonal-plus-coherence state in the Dicke basis.

    Attributes:
        n_qubits: N >= 2
        diag: lam'_0..lam'_N (unnormalized Dicke-basis diagonal)
        coherence: sigma, the off-diagonal entry at coherence_pair
        normalization: rho = matrix / normalization
        coherence_pair: Dicke indices (a, b) of the coherence, default (0, N)
        z_param: Z for family members
    """
    n_qubits: int
    diag: Tuple[float, ...]
    coherence: float = 0.0
    normalization: float = 1.0
    coherence_pair: Optional[Tuple[int, int]] = None
    z_param: Optional[float] = None

    def __post_init__(self):
        n = self.n_qubits
        if n < 2:
            raise BadParamError(f"n_qubits must be >= 2, got {n}")
        object.__setattr__(self, 'diag', tuple(float(v) for v in self.diag))
        if len(self.diag) != n + 1:
            raise BadParamError(f"Expected {n + 1} diagonal entries, got {len(self.diag)}")
        if min(self.diag) < 0:
            raise NegativeWeightError(f"Diagonal entries must be >= 0, got {min(self.diag)}")
        if not self.normalization > 0:
            raise BadParamError(f"normalization must be > 0, got {self.normalization}")
        pair = (0, n) if self.coherence_pair is None else tuple(sorted(self.coherence_pair))
        if pair[0] == pair[1] or not (0 <= pair[0] and pair[1] <= n):
            raise BadParamError(f"Invalid coherence pair {self.coherence_pair} for N={n}")
        object.__setattr__(self, 'coherence_pair', pair)

    @property
    def half(self) -> int:
        """K = floor(N/2): cuts m = 1..K cover every bipartition up to symmetry."""
        return self.n_qubits // 2

    @property
    def has_ghz_coherence(self) -> bool:
        return self.coherence == 0.0 or self.coherence_pair == (0, self.n_qubits)

    def lambdas(self) -> np.ndarray:
        """lam_k = lam'_k / C(N, k)."""
        return np.array([v / _binom(self.n_qubits, k) for k, v in enumerate(self.diag)])

    def dicke_matrix(self) -> np.ndarray:
        """Unnormalized (N+1) x (N+1) matrix in the Dicke basis."""
        out = np.diag(np.array(self.diag))
        a, b = self.coherence_pair
        out[a, b] = out[b, a] = self.coherence
        return out

    def density_matrix(self) -> SymMatrix:
        return SymMatrix(self.dicke_matrix() / self.normalization)

    def unnormalized_trace(self) -> float:
        return float(sum(self.diag))

    def trace(self) -> float:
        return self.unnormalized_trace() / self.normalization


def family_rho(n_qubits: int, z_param: float, sigma: float) -> SymmetricNQubitState:
    """
    Family member with lam_k = f_{K-k}(Z), GHZ coherence sigma and
    normalization 2 (4+Z)^K.

    Raises:
        BadParamError: for even N, K <= 1, Z <= 0 or sigma not in {+1, -1}
    """
    if n_qubits % 2 == 0:
        raise BadParamError(f"The family needs odd N, got {n_qubits} (the 4-qubit example is separate)")
    k_half = (n_qubits - 1) // 2
    if k_half <= 1:
        raise BadParamError(f"The family needs N >= 5, got {n_qubits}")
    if sigma not in (1, -1):
        raise BadParamError(f"sigma must be +1 or -1, got {sigma}")

    f = f_sequence(z_param, k_half + 1)
    diag = [_binom(n_qubits, k) * f.at(k_half - k) for k in range(n_qubits + 1)]
    return SymmetricNQubitState(
        n_qubits=n_qubits,
        diag=tuple(diag),
        coherence=float(sigma),
        normalization=2.0 * (4.0 + z_param) ** k_half,
        z_param=z_param,
    )


def example_4qubit() -> SymmetricNQubitState:
    """Four-qubit PPT-entangled state with the coherence between |D^1> and |D^4>."""
    root7 = math.sqrt(7.0)
    scale = 50.0 * root7
    return SymmetricNQubitState(
        n_qubits=4,
        diag=tuple(v * root7 / scale for v in (7.0, 12.0, 12.0, 12.0, 7.0)),
        coherence=-2.0 * math.sqrt(15.0) / scale,
        coherence_pair=(1, 4),
    )


@dataclass(frozen=True)
class PtBlock:
    """
    One block A = D H D of the partial transpose.

    Rows are the bipartite indices (i, i+n); H is the Hankel core
    H[a, b] = lam_{rows[a] + rows[b] + n}.
    """
    n: int
    rows: Tuple[int, ...]
    a: np.ndarray
    d: np.ndarray
    h: np.ndarray

    @property
    def size(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class PtBlockDecomposition:
    m_cut: int
    coherence_block: np.ndarray
    blocks: List[PtBlock] = field(default_factory=list)

    def eigenvalues(self) -> np.ndarray:
        values = [linalg.eigvalsh(self.coherence_block)]
        values.extend(linalg.eigvalsh(block.a) for block in self.blocks)
        return np.sort(np.concatenate(values))


def _check_cut(state: SymmetricNQubitState, m_cut: int):
    if not 1 <= m_cut <= state.half:
        raise BadCutError(f"Cut m={m_cut} outside 1..{state.half} for N={state.n_qubits}")


def block_rows(n_qubits: int, m_cut: int, n: int) -> range:
    """First-party Dicke indices i of block n (second index i + n)."""
    return range(max(0, -n), min(m_cut, n_qubits - m_cut - n) + 1)


def pt_blocks(state: SymmetricNQubitState, m_cut: int) -> PtBlockDecomposition:
    """
    Block form of the partial transpose across m_cut : N - m_cut qubits.

    Blocks are labelled by n = j - i for n = -m+1..N-m-1; the remaining two
    rows (m, 0) and (0, N-m) form the coherence block [lam_m, sigma; sigma, lam_{N-m}].
    Entries are unnormalized.

    Raises:
        BadCutError: if m_cut is outside 1..K
        BadParamError: if the coherence is not of GHZ type
    """
    _check_cut(state, m_cut)
    if not state.has_ghz_coherence:
        raise BadParamError(f"Block form needs a (0, N) coherence, got {state.coherence_pair}")

    n_q, m = state.n_qubits, m_cut
    lam = state.lambdas()
    blocks = []
    for n in range(-m + 1, n_q - m):
        rows = tuple(block_rows(n_q, m, n))
        d = np.array([math.sqrt(_binom(m, i) * _binom(n_q - m, i + n)) for i in rows])
        h = np.array([[lam[i + k + n] for k in rows] for i in rows])
        blocks.append(PtBlock(n=n, rows=rows, a=d[:, None] * h * d[None, :], d=d, h=h))

    coherence_block = np.array([[lam[m], state.coherence], [state.coherence, lam[n_q - m]]])
    return PtBlockDecomposition(m_cut=m_cut, coherence_block=coherence_block, blocks=blocks)


def block_cholesky(f: FSequence, n: int, m_cut: int, n_qubits: int) -> Tuple[np.ndarray, Dict[str, float]]:
    """
    Rank-2 factorization of the Hankel core of block n for a family member.

    With lam_c = f_{K-c} = f_{c-K-1}, the core is H[a, b] = f_{p+a+b} for
    p = 2 max(0, -n) + n - K - 1, and

        L = [f_{p+a}, sqrt(I_aa)] / sqrt(f_p),   L L^T = H

    Returns:
        (L, checks) where checks holds relative residuals of the
        reconstruction and of the I_ab identities, and the smallest I_aa
    """
    if n_qubits % 2 == 0:
        raise BadParamError(f"The family needs odd N, got {n_qubits}")
    k_half = n_qubits // 2
    if not 1 <= m_cut <= k_half:
        raise BadCutError(f"Cut m={m_cut} outside 1..{k_half}")
    if not -m_cut + 1 <= n <= n_qubits - m_cut - 1:
        raise BadParamError(f"Block label n={n} outside {-m_cut + 1}..{n_qubits - m_cut - 1}")

    size = len(block_rows(n_qubits, m_cut, n))
    p = 2 * max(0, -n) + n - k_half - 1
    fp = f.at(p)

    iaa = np.array([f.i_ab(a, a, p) for a in range(size)])
    lower = np.column_stack([
        [f.at(p + a) for a in range(size)],
        np.sqrt(np.maximum(iaa, 0.0)),
    ]) / math.sqrt(fp)

    core = np.array([[f.at(p + a + b) for b in range(size)] for a in range(size)])
    scale = float(np.max(np.abs(core)))
    iab = np.array([[f.i_ab(a, b, p) for b in range(size)] for a in range(size)])
    iab_shifted = np.array([[f.i_ab(a, b, p + 1) for b in range(size)] for a in range(size)])
    iab_scale = max(float(np.max(np.abs(iab))), 1.0)

    checks = {
        'reconstruction': float(np.max(np.abs(lower @ lower.T - core))) / scale,
        'iab_offset': float(np.max(np.abs(iab - iab_shifted))) / iab_scale,
        'iab_sqrt': float(np.max(np.abs(iab - np.sqrt(np.outer(np.maximum(iaa, 0), np.maximum(iaa, 0)))))) / iab_scale,
        'min_iaa': float(np.min(iaa)),
    }
    return lower, checks


def dicke_isometry(n_qubits: int, m_cut: int) -> np.ndarray:
    """
    Embedding of the N-qubit Dicke basis into Dicke(m) (x) Dicke(N-m).

    |D^a> = sum_{i+j=a} sqrt(C(m,i) C(N-m,j) / C(N,a)) |i>|j>, row i*(N-m+1)+j.
    """
    right = n_qubits - m_cut + 1
    v = np.zeros(((m_cut + 1) * right, n_qubits + 1))
    for i in range(m_cut + 1):
        for j in range(right):
            v[i * right + j, i + j] = math.sqrt(
                _binom(m_cut, i) * _binom(n_qubits - m_cut, j) / _binom(n_qubits, i + j)
            )
    return v


def _dense_pt(matrix: np.ndarray, n_qubits: int, m_cut: int) -> np.ndarray:
    v = dicke_isometry(n_qubits, m_cut)
    return partial_transpose(v @ matrix @ v.T, m_cut + 1, n_qubits - m_cut + 1).array


def dense_partial_transpose(state: SymmetricNQubitState, m_cut: int) -> SymMatrix:
    """Dense unnormalized partial transpose in the bipartite Dicke representation (m = 0 gives rho)."""
    return SymMatrix(_dense_pt(state.dicke_matrix(), state.n_qubits, m_cut))


def is_ppt_all_bipartitions(state: SymmetricNQubitState, tol: Tolerance = Tolerance()) -> bool:
    """PSD partial transpose for every cut m = 1..K."""
    for m in range(1, state.half + 1):
        if state.has_ghz_coherence:
            decomposition = pt_blocks(state, m)
            parts = [decomposition.coherence_block] + [b.a for b in decomposition.blocks]
            if not all(is_psd(part, tol) for part in parts):
                logger.info(f"Partial transpose at m={m} is not PSD")
                return False
        elif not is_psd(dense_partial_transpose(state, m), tol):
            logger.info(f"Partial transpose at m={m} is not PSD")
            return False
    return True


def ranks_profile(state: SymmetricNQubitState, tol: Tolerance = Tolerance()) -> List[int]:
    """
    Ranks of rho, rho^{G_1}, ..., rho^{G_K}.

    With GHZ coherence each block is ranked against its own largest singular
    value; otherwise the dense partial transpose is ranked.
    """
    ranks = [numerical_rank(state.dicke_matrix(), tol)]
    for m in range(1, state.half + 1):
        if state.has_ghz_coherence:
            decomposition = pt_blocks(state, m)
            ranks.append(
                numerical_rank(decomposition.coherence_block, tol)
                + sum(numerical_rank(b.a, tol) for b in decomposition.blocks)
            )
        else:
            ranks.append(numerical_rank(dense_partial_transpose(state, m), tol))
    return ranks


def ranks_frame(state: SymmetricNQubitState, tol: Tolerance = Tolerance()) -> pd.DataFrame:
    """Per-block table of sizes, ranks and minimum eigenvalues for every cut."""
    records = []
    for m in range(1, state.half + 1):
        if state.has_ghz_coherence:
            decomposition = pt_blocks(state, m)
            parts = [('coherence', decomposition.coherence_block)]
            parts.extend((str(b.n), b.a) for b in decomposition.blocks)
        else:
            parts = [('dense', dense_partial_transpose(state, m).array)]
        for label, part in parts:
            records.append({
                'm': m,
                'block': label,
                'size': part.shape[0],
                'rank': numerical_rank(part, tol),
                'min_eigenvalue': float(sym_eig(part)[0][0]),
            })
    return pd.DataFrame(records, columns=['m', 'block', 'size', 'rank', 'min_eigenvalue'])


def _pt_kernel(state: SymmetricNQubitState, m_cut: int, tol: Tolerance) -> np.ndarray:
    """Kernel of rho^{G_m} as columns in the bipartite index space."""
    n_q = state.n_qubits
    if m_cut == 0:
        return kernel_basis(state.dicke_matrix(), tol)
    if not state.has_ghz_coherence:
        return kernel_basis(dense_partial_transpose(state, m_cut), tol)

    right = n_q - m_cut + 1
    dim = (m_cut + 1) * right
    decomposition = pt_blocks(state, m_cut)
    parts = [((m_cut * right, n_q - m_cut), decomposition.coherence_block)]
    parts.extend(
        (tuple(i * right + i + b.n for i in b.rows), b.a)
        for b in decomposition.blocks
    )

    columns = []
    for index, part in parts:
        local = kernel_basis(part, tol)
        for vec in local.T:
            full = np.zeros(dim)
            full[list(index)] = vec
            columns.append(full)
    return np.column_stack(columns) if columns else np.zeros((dim, 0))


def _constraint_dimension(state: SymmetricNQubitState, basis: Sequence[np.ndarray], tol: Tolerance) -> int:
    """Dimension of span{basis} restricted to H^{G_m} K_m = 0 for every m = 0..K."""
    n_q = state.n_qubits
    rows = []
    for m in range(0, state.half + 1):
        kernel = _pt_kernel(state, m, tol)
        if not kernel.shape[1]:
            continue
        rows.append(np.column_stack([
            (_dense_pt(e, n_q, m) @ kernel).ravel() for e in basis
        ]))
        logger.debug(f"Cut m={m}: {kernel.shape[1]} kernel vectors")

    if not rows:
        return len(basis)
    constraints = np.vstack(rows)
    return len(basis) - numerical_rank(constraints, tol)


def extremality_dimension(state: SymmetricNQubitState, tol: Tolerance = Tolerance()) -> int:
    """
    Dimension of the real matrices H in span{|D^k><D^k|, coherence} whose
    partial transposes keep their range inside that of rho's, for every cut.

    The state is extremal in the PPT set iff the result is 1.
    """
    n_q = state.n_qubits
    basis = []
    for k in range(n_q + 1):
        e = np.zeros((n_q + 1, n_q + 1))
        e[k, k] = 1.0
        basis.append(e)
    a, b = state.coherence_pair
    coherence = np.zeros((n_q + 1, n_q + 1))
    coherence[a, b] = coherence[b, a] = 1.0
    basis.append(coherence)
    return _constraint_dimension(state, basis, tol)


def extremality_dimension_full(state: SymmetricNQubitState, tol: Tolerance = Tolerance()) -> int:
    """Same test over every real symmetric Dicke-basis matrix (slow; meant for N <= 7)."""
    n_q = state.n_qubits
    if n_q > 7:
        logger.warning(f"Full-space extremality check at N={n_q} is slow")
    basis = []
    for a in range(n_q + 1):
        for b in range(a, n_q + 1):
            e = np.zeros((n_q + 1, n_q + 1))
            e[a, b] = e[b, a] = 1.0
            basis.append(e)
    return _constraint_dimension(state, basis, tol)
