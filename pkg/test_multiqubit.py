"""
Symmetric N-qubit family: recurrence, partial-transpose blocks, ranks,
trace identity, extremality and the N-qubit verdict
"""
import math
import sys
from pathlib import Path
sys.path.append(str(Path(__file__).parent))

import numpy as np
import pytest

from core.certify.certificates import ExtremalPptEvidence, NptEvidence, TraceEvidence, Verdict
from core.certify.pipeline import certify_nqubit
from core.errors import BadCutError, BadParamError, NegativeWeightError
from core.numerics.matcore import numerical_rank
from core.states.multiqubit import (
    SymmetricNQubitState, block_cholesky, dense_partial_transpose, dicke_isometry, example_4qubit,
    extremality_dimension, extremality_dimension_full, f_sequence, family_rho, is_ppt_all_bipartitions,
    pt_blocks, ranks_frame, ranks_profile,
)


def with_coherence(state: SymmetricNQubitState, coherence: float) -> SymmetricNQubitState:
    return SymmetricNQubitState(
        n_qubits=state.n_qubits, diag=state.diag, coherence=coherence, normalization=state.normalization,
    )


def test_f_sequence_examples():
    f = f_sequence(1.0, 6)
    assert f.values[:5] == (1.0, 2.0, 5.0, 13.0, 34.0)

    f = f_sequence(0.37, 3)
    assert f.at(0) == 1.0
    assert f.at(1) == pytest.approx(1.37)
    assert f.at(12) == pytest.approx(f.closed_form(12), rel=1e-9)

    for p in range(6):
        assert f.at(-p - 1) == f.at(p)
        assert f.closed_form(-p - 1) == pytest.approx(f.closed_form(p), rel=1e-9)


def test_f_sequence_closed_form_agreement():
    for z in (0.01, 0.1, 1.0, 10.0, 100.0):
        f = f_sequence(z, 30)
        assert f.max_closed_form_error() <= 1e-9
        assert f.alpha + f.beta == pytest.approx(2 + z)
    for z in (0.1, 1.0, 10.0):
        f = f_sequence(z, 2)
        assert f.alpha * f.beta == pytest.approx(1.0, abs=1e-12)


def test_f_sequence_errors():
    with pytest.raises(BadParamError):
        f_sequence(0.0, 5)
    with pytest.raises(BadParamError):
        f_sequence(-1.0, 5)
    with pytest.raises(BadParamError):
        f_sequence(1.0, 0)


def test_family_rho_examples():
    state = family_rho(5, 1.0, 1)
    assert state.unnormalized_trace() == pytest.approx(50.0)
    assert state.trace() == pytest.approx(1.0)
    np.testing.assert_allclose(state.diag, [5, 10, 10, 10, 10, 5])
    assert state.coherence_pair == (0, 5)

    for n, z in ((5, 0.3), (7, 2.0), (9, 1.0)):
        lam = family_rho(n, z, -1).lambdas()
        assert lam[n // 2] == pytest.approx(1.0)
        np.testing.assert_allclose(lam, lam[::-1], rtol=1e-12)


def test_trace_identity():
    for n in (5, 7, 9):
        for z in (0.1, 1.0, 10.0):
            state = family_rho(n, z, 1)
            k = (n - 1) // 2
            assert state.unnormalized_trace() == pytest.approx(2 * (4 + z) ** k, rel=1e-9)
            assert state.trace() == pytest.approx(1.0, rel=1e-9)


def test_family_rho_errors():
    with pytest.raises(BadParamError):
        family_rho(6, 1.0, 1)
    with pytest.raises(BadParamError):
        family_rho(3, 1.0, 1)
    with pytest.raises(BadParamError):
        family_rho(5, 0.0, 1)
    with pytest.raises(BadParamError):
        family_rho(5, 1.0, 0.5)


def test_state_validation():
    with pytest.raises(NegativeWeightError):
        SymmetricNQubitState(n_qubits=2, diag=(1.0, -0.1, 1.0))
    with pytest.raises(BadParamError):
        SymmetricNQubitState(n_qubits=3, diag=(1.0, 1.0))
    with pytest.raises(BadParamError):
        SymmetricNQubitState(n_qubits=3, diag=(1.0,) * 4, coherence=0.1, coherence_pair=(2, 2))


def test_pt_blocks_coherence_block_at_half_cut():
    for sigma in (1, -1):
        state = family_rho(7, 0.8, sigma)
        decomposition = pt_blocks(state, 3)
        np.testing.assert_allclose(decomposition.coherence_block, [[1, sigma], [sigma, 1]], atol=1e-12)
        assert np.linalg.det(decomposition.coherence_block) == pytest.approx(0.0, abs=1e-12)


def test_pt_blocks_first_block_determinant():
    for n_q, z in ((5, 1.0), (7, 0.5), (9, 3.0)):
        k = n_q // 2
        block = pt_blocks(family_rho(n_q, z, 1), k).blocks[0]
        assert block.n == -k + 1
        assert block.size == 2
        assert np.linalg.det(block.a) == pytest.approx(k * (n_q - k) * z, rel=1e-9)


def test_pt_blocks_structure():
    state = family_rho(9, 1.0, 1)
    for m in range(1, 5):
        decomposition = pt_blocks(state, m)
        assert [b.n for b in decomposition.blocks] == list(range(-m + 1, 9 - m))
        assert sum(b.size for b in decomposition.blocks) + 2 == (m + 1) * (9 - m + 1)
        for b in decomposition.blocks:
            np.testing.assert_allclose(b.a, np.diag(b.d) @ b.h @ np.diag(b.d), rtol=1e-10)

    with pytest.raises(BadCutError):
        pt_blocks(state, 0)
    with pytest.raises(BadCutError):
        pt_blocks(state, 5)
    with pytest.raises(BadParamError):
        pt_blocks(example_4qubit(), 1)


def test_block_spectrum_matches_dense_partial_transpose():
    states = [family_rho(n, z, s) for n, z, s in ((5, 1.0, 1), (7, 0.5, -1), (9, 2.0, 1))]
    rng = np.random.default_rng(9)
    for n in (3, 4, 6, 8):
        states.append(SymmetricNQubitState(n_qubits=n, diag=tuple(rng.random(n + 1))))
    for state in states:
        for m in range(1, state.half + 1):
            blocks = pt_blocks(state, m).eigenvalues()
            dense = np.linalg.eigvalsh(dense_partial_transpose(state, m).array)
            scale = max(np.abs(dense).max(), 1.0)
            np.testing.assert_allclose(blocks, dense, atol=1e-8 * scale)


def test_dicke_isometry_is_orthonormal():
    for n_q, m in ((5, 2), (6, 1), (9, 4)):
        v = dicke_isometry(n_q, m)
        np.testing.assert_allclose(v.T @ v, np.eye(n_q + 1), atol=1e-12)


def test_interior_blocks_have_rank_two_and_recurrence_kernel():
    for n_q, z in ((7, 0.5), (9, 1.0), (9, 10.0)):
        state = family_rho(n_q, z, 1)
        for m in range(1, state.half + 1):
            for b in pt_blocks(state, m).blocks:
                if not -m + 2 <= b.n <= n_q - m - 2:
                    continue
                assert numerical_rank(b.a) == min(2, b.size)
                for start in range(b.size - 2):
                    v = np.zeros(b.size)
                    v[start:start + 3] = (1.0, -(2.0 + z), 1.0)
                    assert np.max(np.abs(b.h @ v)) <= 1e-9 * np.max(np.abs(b.h))


def test_block_cholesky():
    n_q, z = 9, 1.0
    k = n_q // 2
    f = f_sequence(z, n_q + 2)
    state = family_rho(n_q, z, 1)
    for m in range(1, k + 1):
        for b in pt_blocks(state, m).blocks:
            lower, checks = block_cholesky(f, b.n, m, n_q)
            assert lower.shape == (b.size, 2)
            assert checks['reconstruction'] <= 1e-9
            assert checks['iab_offset'] <= 1e-10
            assert checks['iab_sqrt'] <= 1e-10
            assert checks['min_iaa'] >= -1e-12
            np.testing.assert_allclose(lower @ lower.T, b.h, rtol=1e-9)

    with pytest.raises(BadParamError):
        block_cholesky(f, 0, 1, 8)
    with pytest.raises(BadCutError):
        block_cholesky(f, 0, 5, 9)
    with pytest.raises(BadParamError):
        block_cholesky(f, 9, 1, 9)


def test_is_ppt_all_bipartitions():
    assert is_ppt_all_bipartitions(family_rho(7, 1.0, 1))
    assert is_ppt_all_bipartitions(family_rho(7, 1.0, -1))
    assert not is_ppt_all_bipartitions(with_coherence(family_rho(7, 1.0, 1), 2.0))
    assert is_ppt_all_bipartitions(with_coherence(family_rho(7, 1.0, 1), 0.0))
    assert is_ppt_all_bipartitions(example_4qubit())


def test_ranks_profile():
    assert ranks_profile(family_rho(5, 1.0, 1)) == [6, 10, 9]
    assert ranks_profile(family_rho(7, 0.5, -1)) == [8, 14, 14, 13]
    for n_q in (5, 7, 9):
        ranks = ranks_profile(family_rho(n_q, 1.0, 1))
        assert ranks == [n_q + 1] + [2 * n_q] * (n_q // 2 - 1) + [2 * n_q - 1]
    assert ranks_profile(example_4qubit()) == [5, 7, 8]


def test_ranks_frame():
    frame = ranks_frame(family_rho(5, 1.0, 1))
    assert list(frame.columns) == ['m', 'block', 'size', 'rank', 'min_eigenvalue']
    assert len(frame) == 10
    assert frame.groupby('m')['rank'].sum().tolist() == [10, 9]
    assert (frame['min_eigenvalue'] >= -1e-9).all()

    frame = ranks_frame(example_4qubit())
    assert frame['block'].tolist() == ['dense', 'dense']
    assert frame['rank'].tolist() == [7, 8]


def test_example_4qubit():
    state = example_4qubit()
    rho = state.density_matrix().array
    root7 = math.sqrt(7)
    np.testing.assert_allclose(np.diag(rho), np.array([7, 12, 12, 12, 7]) * root7 / (50 * root7))
    assert rho[1, 4] == pytest.approx(-2 * math.sqrt(15) / (50 * root7))
    assert rho[0, 4] == 0.0
    assert state.trace() == pytest.approx(1.0, abs=1e-12)
    assert not state.has_ghz_coherence


def test_extremality_dimension():
    assert extremality_dimension(family_rho(5, 1.0, 1)) == 1
    assert extremality_dimension(family_rho(7, 0.5, -1)) == 1

    pure = SymmetricNQubitState(n_qubits=5, diag=(1.0, 0, 0, 0, 0, 0))
    assert extremality_dimension(pure) == 1

    assert extremality_dimension(with_coherence(family_rho(5, 1.0, 1), 0.0)) > 1
    assert extremality_dimension(example_4qubit()) == 1


def test_extremality_dimension_full_space():
    assert extremality_dimension_full(family_rho(5, 1.0, 1)) == 1


def test_certify_nqubit_verdicts():
    cert = certify_nqubit(family_rho(5, 1.0, 1))
    assert cert.verdict == Verdict.ENTANGLED
    assert isinstance(cert.evidence, ExtremalPptEvidence)
    assert cert.evidence.ranks == [6, 10, 9]
    assert cert.evidence.extremality_dimension == 1

    cert = certify_nqubit(example_4qubit())
    assert cert.verdict == Verdict.ENTANGLED
    assert cert.evidence.ranks == [5, 7, 8]

    cert = certify_nqubit(with_coherence(family_rho(5, 1.0, 1), 2.0))
    assert cert.verdict == Verdict.ENTANGLED
    assert isinstance(cert.evidence, NptEvidence)
    assert cert.evidence.min_eigenvalue < 0

    cert = certify_nqubit(with_coherence(family_rho(5, 1.0, 1), 0.0))
    assert cert.verdict == Verdict.INCONCLUSIVE
    assert isinstance(cert.evidence, TraceEvidence)


@pytest.mark.parametrize('n_qubits', [5, 7, 9])
@pytest.mark.parametrize('z_param', [0.1, 1.0, 10.0])
@pytest.mark.parametrize('sigma', [1, -1])
def test_family_is_extremal_ppt(n_qubits, z_param, sigma):
    state = family_rho(n_qubits, z_param, sigma)
    assert is_ppt_all_bipartitions(state)
    assert ranks_profile(state) == [n_qubits + 1] + [2 * n_qubits] * (n_qubits // 2 - 1) + [2 * n_qubits - 1]
    assert state.unnormalized_trace() == pytest.approx(2 * (4 + z_param) ** (n_qubits // 2), rel=1e-9)
    assert extremality_dimension(state) == 1
