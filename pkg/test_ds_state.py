"""
DS state representation, the M(rho) correspondence and the PPT test
"""
import sys
from pathlib import Path
sys.path.append(str(Path(__file__).parent))

import numpy as np
import pytest

from core.errors import BadIndexError, BadNormalizationError, BadParamError, NegativeWeightError
from core.numerics.matcore import Tolerance, is_psd, partial_transpose
from core.states.ds_state import (
    DsState, MMatrix, explicit_pt_spectrum, from_m_matrix, full_density_matrix, is_extremal_separable_candidate,
    is_ppt, m_matrix, new_ds_state, normalize, pt_spectrum,
)
from core.states.decomp import state_ix

EXAMPLE2 = {(0, 0): 0.19, (0, 1): 0.16, (0, 2): 0.23, (1, 1): 0.064, (1, 2): 0.16, (2, 2): 0.196}
EXAMPLE2_M = np.array([[19, 8, 11.5], [8, 6.4, 8], [11.5, 8, 19.6]]) / 100


def circulant_state() -> DsState:
    p = {}
    for i in range(6):
        p[(i, i)] = 2.0
        for j in range(i + 1, 6):
            gap = min(j - i, 6 - (j - i))
            p[(i, j)] = {1: 3.0, 2: 1.0, 3: 0.0}[gap]
    return new_ds_state(6, p)


def random_state(rng: np.random.Generator, d: int) -> DsState:
    p = {}
    for i in range(d):
        for j in range(i, d):
            if rng.random() < 0.7:
                p[(i, j)] = float(rng.exponential())
    return new_ds_state(d, p)


def test_new_ds_state_examples():
    rho = new_ds_state(2, {(0, 0): 1.0}, normalized=True)
    assert rho.p(0, 0) == 1.0 and rho.p(1, 0) == 0.0

    rho = new_ds_state(3, EXAMPLE2, normalized=True)
    assert rho.total_weight() == pytest.approx(1.0, abs=1e-12)
    assert rho.p(2, 0) == 0.23

    with pytest.raises(NegativeWeightError):
        new_ds_state(3, {(0, 1): -0.1})


def test_new_ds_state_rejections():
    with pytest.raises(BadNormalizationError):
        new_ds_state(2, {(0, 0): 0.5}, normalized=True)
    with pytest.raises(BadIndexError):
        new_ds_state(2, {(1, 0): 0.5})
    with pytest.raises(BadIndexError):
        new_ds_state(2, {(0, 2): 0.5})
    with pytest.raises(BadParamError):
        new_ds_state(1, {(0, 0): 1.0})


def test_zero_pairs_and_diagonal():
    rho = circulant_state()
    assert rho.zero_pairs() == [(0, 3), (1, 4), (2, 5)]
    assert rho.zero_diagonal() == []
    assert new_ds_state(3, {(0, 1): 1.0}).zero_diagonal() == [0, 1, 2]


def test_normalize():
    rho = normalize(circulant_state())
    assert rho.normalized
    assert rho.total_weight() == pytest.approx(1.0)
    with pytest.raises(BadNormalizationError):
        normalize(new_ds_state(2, {}))


def test_m_matrix_examples():
    np.testing.assert_array_equal(m_matrix(new_ds_state(2, {(0, 0): 1.0})).array, [[1, 0], [0, 0]])
    np.testing.assert_allclose(m_matrix(new_ds_state(3, EXAMPLE2)).array, EXAMPLE2_M, atol=1e-15)

    first_row = m_matrix(circulant_state()).array[0]
    np.testing.assert_array_equal(first_row, [2, 1.5, 0.5, 0, 0.5, 1.5])


def test_from_m_matrix_examples():
    rho = from_m_matrix(np.array([[1.0, 0.0], [0.0, 0.0]]))
    assert rho.weights == {(0, 0): 1.0}

    rho = from_m_matrix(EXAMPLE2_M)
    for key, value in EXAMPLE2.items():
        assert rho.p(*key) == pytest.approx(value, abs=1e-15)

    with pytest.raises(NegativeWeightError):
        from_m_matrix(np.array([[0.0, -1.0], [-1.0, 0.0]]))
    with pytest.raises(NegativeWeightError):
        MMatrix([[0.0, -1.0], [-1.0, 0.0]])


def test_round_trip_and_l1_identity():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        rho = random_state(rng, int(rng.integers(2, 7)))
        m = m_matrix(rho)
        assert m.entrywise_l1() == pytest.approx(rho.total_weight(), abs=1e-12)
        assert m_matrix(from_m_matrix(m)) == m
        back = from_m_matrix(m)
        for key, value in rho.weights.items():
            assert back.p(*key) == value


def test_full_density_matrix_examples():
    rho = full_density_matrix(new_ds_state(2, {(0, 1): 1.0})).array
    expected = np.zeros((4, 4))
    expected[np.ix_([1, 2], [1, 2])] = 0.5
    np.testing.assert_array_equal(rho, expected)

    rho = full_density_matrix(new_ds_state(2, {(0, 0): 1.0})).array
    assert rho[0, 0] == 1.0 and np.count_nonzero(rho) == 1

    assert np.trace(full_density_matrix(new_ds_state(3, EXAMPLE2)).array) == pytest.approx(1.0)


def test_pt_spectrum_examples():
    report = pt_spectrum(new_ds_state(2, {(0, 1): 1.0}))
    np.testing.assert_allclose(report.m_eigenvalues, [-0.5, 0.5])
    assert report.singleton_blocks == [(0.5, 2)]
    assert report.min_eigenvalue == pytest.approx(-0.5)
    assert report.all_eigenvalues().size == 4

    report = pt_spectrum(new_ds_state(2, {(0, 0): 0.5, (1, 1): 0.5}))
    np.testing.assert_allclose(report.m_eigenvalues, [0.5, 0.5])
    assert report.singleton_blocks == [(0.0, 2)]

    report = pt_spectrum(circulant_state())
    assert min(report.m_eigenvalues) >= -1e-12


def test_pt_spectrum_matches_explicit_partial_transpose():
    rng = np.random.default_rng(99)
    tol = Tolerance()
    for _ in range(200):
        d = int(rng.integers(2, 7))
        rho = random_state(rng, d)
        block = pt_spectrum(rho).all_eigenvalues()
        dense = explicit_pt_spectrum(rho)
        assert block.size == d * d
        np.testing.assert_allclose(block, dense, atol=1e-8)

        pt = partial_transpose(full_density_matrix(rho), d, d)
        assert is_ppt(rho, tol) == is_psd(pt, tol)


def test_is_ppt_examples():
    assert not is_ppt(new_ds_state(2, {(0, 1): 1.0}))
    assert is_ppt(circulant_state())
    assert is_ppt(new_ds_state(2, {(0, 0): 1.0}))


def test_is_extremal_separable_candidate_examples():
    assert is_extremal_separable_candidate(state_ix([0.5, 0.5]))
    assert not is_extremal_separable_candidate(new_ds_state(3, EXAMPLE2))
    diagonal = new_ds_state(3, {(i, i): 1 / 3 for i in range(3)})
    assert not is_extremal_separable_candidate(diagonal)

