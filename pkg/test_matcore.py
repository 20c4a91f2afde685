"""
Matrix numerics: eigensolver, PSD test, rank, pseudo-inverse, range, simplex minimum
"""
import sys
from itertools import combinations
from pathlib import Path
sys.path.append(str(Path(__file__).parent))

import numpy as np
import pytest

from core.certify.witnesses import HORN
from core.errors import BadParamError, DimensionMismatchError, NotSymmetricError
from core.numerics.matcore import (
    SymMatrix, Tolerance, in_range, is_psd, kernel_basis, min_quad_over_simplex,
    numerical_rank, partial_transpose, project_to_simplex, pseudo_inverse, sym_eig,
)


def circulant_m():
    row = np.array([2, 1.5, 0.5, 0, 0.5, 1.5])
    return np.array([np.roll(row, i) for i in range(6)])


def test_symmatrix_construction():
    m = SymMatrix([[1.0, 2.0], [2.0 + 1e-14, 3.0]])
    assert m.entry(0, 1) == m.entry(1, 0)
    assert m.dim == 2
    with pytest.raises(ValueError):
        m.array[0, 0] = 5.0

    with pytest.raises(NotSymmetricError):
        SymMatrix([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(DimensionMismatchError):
        SymMatrix(np.zeros((2, 3)))
    assert SymMatrix.identity(3) == SymMatrix(np.eye(3))


def test_tolerance_must_be_positive():
    with pytest.raises(BadParamError):
        Tolerance(abs_eig=0.0)
    with pytest.raises(BadParamError):
        Tolerance(rank_cut=-1e-9)


def test_sym_eig_examples():
    values, _ = sym_eig(SymMatrix.identity(3))
    np.testing.assert_allclose(values, [1, 1, 1])

    values, _ = sym_eig(SymMatrix.diag([2, 0, -1]))
    np.testing.assert_allclose(values, [-1, 0, 2], atol=1e-15)

    values, _ = sym_eig(HORN)
    assert values[0] < 0


def test_sym_eig_reconstruction_random():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = rng.integers(1, 9)
        a = rng.normal(size=(n, n))
        a = (a + a.T) / 2
        values, vectors = sym_eig(a)
        assert np.all(np.diff(values) >= 0)
        residual = np.linalg.norm(a - vectors @ np.diag(values) @ vectors.T)
        assert residual <= 1e-10 * (1 + np.linalg.norm(a))


def test_is_psd_examples():
    assert is_psd(SymMatrix.identity(4))
    assert not is_psd(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert is_psd(circulant_m())

    rng = np.random.default_rng(1)
    for _ in range(50):
        b = rng.normal(size=(5, rng.integers(1, 6)))
        assert is_psd(b @ b.T)


def test_numerical_rank_examples():
    assert numerical_rank(SymMatrix.zeros(5)) == 0
    assert numerical_rank(circulant_m()) == 3
    assert numerical_rank(np.ones((4, 4))) == 1


def test_pseudo_inverse_examples():
    np.testing.assert_allclose(pseudo_inverse(SymMatrix.identity(3)).array, np.eye(3))
    np.testing.assert_allclose(pseudo_inverse(SymMatrix.diag([2, 0])).array, np.diag([0.5, 0]))

    m = np.array([[19, 8, 11.5], [8, 6.4, 8], [11.5, 8, 19.6]]) / 100
    p = pseudo_inverse(m).array
    np.testing.assert_allclose(m @ p @ m, m, atol=1e-8)


def test_pseudo_inverse_moore_penrose_random():
    rng = np.random.default_rng(3)
    for rank in range(1, 6):
        b = rng.normal(size=(5, rank))
        m = b @ b.T
        p = pseudo_inverse(m).array
        scale = 1e-8 * max(np.linalg.norm(m, 2), 1.0) * max(np.linalg.norm(p, 2), 1.0)
        np.testing.assert_allclose(m @ p @ m, m, atol=scale)
        np.testing.assert_allclose(p @ m @ p, p, atol=scale)
        np.testing.assert_allclose(m @ p, (m @ p).T, atol=scale)
        np.testing.assert_allclose(p @ m, (p @ m).T, atol=scale)


def test_in_range_examples():
    assert in_range(SymMatrix.identity(3), [0.3, -2.0, 1.0])
    assert not in_range(SymMatrix.diag([1, 0]), [0, 1])
    u = np.ones(4)
    assert in_range(np.outer(u, u), u)
    with pytest.raises(DimensionMismatchError):
        in_range(SymMatrix.identity(3), [1.0, 2.0])


def test_kernel_basis_matches_rank():
    m = circulant_m()
    kernel = kernel_basis(m)
    assert kernel.shape == (6, 3)
    np.testing.assert_allclose(m @ kernel, 0, atol=1e-12)
    np.testing.assert_allclose(kernel.T @ kernel, np.eye(3), atol=1e-12)


def test_partial_transpose_of_product_state():
    a = np.array([[1.0, 0.5], [0.5, 2.0]])
    b = np.array([[3.0, 1.0, 0.0], [1.0, 1.0, 0.2], [0.0, 0.2, 1.0]])
    pt = partial_transpose(np.kron(a, b), 2, 3)
    np.testing.assert_allclose(pt.array, np.kron(a, b.T))
    with pytest.raises(DimensionMismatchError):
        partial_transpose(np.eye(6), 3, 3)


def test_project_to_simplex():
    x = project_to_simplex(np.array([0.4, 2.0, -1.0]))
    np.testing.assert_allclose(x, [0.0, 1.0, 0.0])
    x = project_to_simplex(np.array([0.2, 0.3, 0.5]))
    np.testing.assert_allclose(x, [0.2, 0.3, 0.5])


def test_min_quad_over_simplex_examples():
    value, x = min_quad_over_simplex(SymMatrix.identity(3))
    assert value == pytest.approx(1 / 3, abs=1e-9)
    np.testing.assert_allclose(x, [1 / 3] * 3, atol=1e-6)

    value, x = min_quad_over_simplex(HORN)
    assert value == pytest.approx(0.0, abs=1e-12)
    assert np.all(x >= 0) and x.sum() == pytest.approx(1.0)

    value, x = min_quad_over_simplex(-np.eye(2))
    assert value == pytest.approx(-1.0)
    assert sorted(x.tolist()) == pytest.approx([0.0, 1.0])

    with pytest.raises(BadParamError):
        min_quad_over_simplex(np.eye(2), restarts=0)


def test_min_quad_value_is_attained_and_beats_every_seed():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        q = rng.normal(size=(n, n))
        q = (q + q.T) / 2
        value, x = min_quad_over_simplex(q, restarts=4, iters=200, seed=5)
        assert np.all(x >= 0) and x.sum() == pytest.approx(1.0)
        assert value == pytest.approx(float(x @ q @ x), abs=1e-12)
        seeds = [np.eye(n)[i] for i in range(n)]
        seeds += [(np.eye(n)[i] + np.eye(n)[j]) / 2 for i, j in combinations(range(n), 2)]
        assert value <= min(float(s @ q @ s) for s in seeds) + 1e-12
