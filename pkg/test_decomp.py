"""
Constructive separable decompositions and the extremal separable states
"""
import sys
from pathlib import Path
sys.path.append(str(Path(__file__).parent))

import numpy as np
import pytest

from core.certify.certificates import CpFactorization
from core.errors import AllZeroError, DimensionMismatchError, NegativeWeightError
from core.states.decomp import (
    ProductTerm, SeparableDecomposition, decomposition_density_matrix, decomposition_to_state, sigma_xyz,
    sigma_xyz_decomposition, state_i, state_ix, verify_decomposition, zeta_decomposition,
)
from core.states.ds_state import from_m_matrix, full_density_matrix, is_extremal_separable_candidate, m_matrix, new_ds_state


def test_zeta_decomposition_d2_column():
    dec = zeta_decomposition(np.array([[0.5], [0.5]]))
    assert len(dec) == 8
    np.testing.assert_allclose(dec.weights(), 1 / 8)

    expected = new_ds_state(2, {(0, 0): 0.25, (1, 1): 0.25, (0, 1): 0.5})
    np.testing.assert_allclose(decomposition_density_matrix(dec), full_density_matrix(expected).array, atol=1e-12)
    assert verify_decomposition(expected, dec)


def test_zeta_decomposition_diagonal():
    dec = zeta_decomposition(np.eye(3) / np.sqrt(3))
    target = new_ds_state(3, {(i, i): 1 / 3 for i in range(3)})
    assert verify_decomposition(target, dec)
    assert dec.trace() == pytest.approx(1.0, abs=1e-9)


def test_zeta_decomposition_random_factor():
    rng = np.random.default_rng(5)
    b = np.abs(rng.normal(size=(5, 3)))
    dec = zeta_decomposition(CpFactorization(b))
    rho = from_m_matrix(b @ b.T)

    reconstructed = decomposition_density_matrix(dec)
    target = full_density_matrix(rho).array
    assert np.max(np.abs(reconstructed - target)) <= 1e-9 * (1 + rho.total_weight())
    assert dec.trace() == pytest.approx(rho.total_weight(), rel=1e-9)

    # everything outside the DS pattern cancels
    d = 5
    mask = np.zeros((d * d, d * d), dtype=bool)
    for i in range(d):
        for j in range(d):
            mask[i * d + j, i * d + j] = True
            mask[i * d + j, j * d + i] = True
    assert np.max(np.abs(reconstructed[~mask])) <= 1e-10


def test_zeta_decomposition_drops_zero_columns():
    b = np.array([[1.0, 0.0], [0.0, 0.0]])
    assert len(zeta_decomposition(b)) == 2 * 4
    with pytest.raises(NegativeWeightError):
        zeta_decomposition(np.array([[1.0], [-0.1]]))


def test_decomposition_to_state_reads_back_weights():
    rho = state_i(3)
    back = decomposition_to_state(zeta_decomposition(np.ones(3)))
    for key, value in rho.weights.items():
        assert back.p(*key) == pytest.approx(value, abs=1e-12)


def test_state_i():
    rho = state_i(3)
    dense = full_density_matrix(rho).array
    expected = np.eye(9)
    for i in range(3):
        for j in range(3):
            if i != j:
                expected[i * 3 + j, j * 3 + i] = 1.0
    np.testing.assert_allclose(dense, expected)

    np.testing.assert_array_equal(m_matrix(state_i(2)).array, np.ones((2, 2)))
    for d in (2, 4, 7):
        assert m_matrix(state_i(d)).entrywise_l1() == pytest.approx(d * d)

    assert verify_decomposition(state_i(3), zeta_decomposition(np.ones(3)))


def test_state_ix():
    rho = state_ix([1, 1])
    assert rho.p(0, 0) == pytest.approx(0.25)
    assert rho.p(1, 1) == pytest.approx(0.25)
    assert rho.p(0, 1) == pytest.approx(0.5)
    assert rho.normalized

    x = [0.3746, 0.2516, 0.3738]
    u = np.array(x) / sum(x)
    np.testing.assert_allclose(m_matrix(state_ix(x)).array, np.outer(u, u), atol=1e-15)
    assert m_matrix(state_ix(x)).entrywise_l1() == pytest.approx(1.0)

    rng = np.random.default_rng(8)
    for _ in range(10):
        x = rng.random(int(rng.integers(2, 7)))
        assert is_extremal_separable_candidate(state_ix(x))
        np.testing.assert_allclose(m_matrix(state_ix(3.7 * x)).array, m_matrix(state_ix(x)).array, atol=1e-12)

    with pytest.raises(AllZeroError):
        state_ix([0, 0, 0])


def test_sigma_xyz():
    assert sigma_xyz(1, 0, 0).weights == {(0, 0): 1.0}

    rho = sigma_xyz(1, 1, 0)
    assert rho.weights == {(0, 0): 1.0, (1, 1): 1.0, (0, 1): 2.0}

    assert sigma_xyz(1, 1, 1).weights == state_i(3).weights
    assert sigma_xyz(-0.5j, 2.0, -1.5).weights == sigma_xyz(0.5, 2.0, 1.5).weights


def test_sigma_xyz_decomposition_reconstructs():
    x, y, z = 0.8, 0.3 + 0.4j, -1.1
    dec = sigma_xyz_decomposition(x, y, z)
    assert len(dec) == 12
    assert verify_decomposition(sigma_xyz(x, y, z), dec)
    with pytest.raises(AllZeroError):
        sigma_xyz_decomposition(0, 0, 0)


def test_verify_decomposition_rejections():
    rho = state_i(3)
    assert not verify_decomposition(rho, SeparableDecomposition(d=3))
    with pytest.raises(DimensionMismatchError):
        verify_decomposition(rho, SeparableDecomposition(d=2))
    with pytest.raises(NegativeWeightError):
        ProductTerm(weight=0.0, ket=np.ones(2))


def test_zeta_decomposition_random_factors():
    rng = np.random.default_rng(100)
    for _ in range(100):
        d = int(rng.integers(2, 6))
        b = np.abs(rng.normal(size=(d, int(rng.integers(1, 5)))))
        dec = zeta_decomposition(CpFactorization(b))
        rho = from_m_matrix(b @ b.T)
        reconstructed = decomposition_density_matrix(dec)
        target = full_density_matrix(rho).array
        assert np.max(np.abs(reconstructed - target)) <= 1e-9 * (1 + rho.total_weight())
        assert verify_decomposition(rho, dec)
