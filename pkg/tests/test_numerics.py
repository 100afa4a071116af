import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lsqcore.numerics import pseudoinverse, rank, solve, svd


def indicator_matrix(coalitions, n):
    """Columns are 0/1 membership vectors of the coalitions."""
    M = np.zeros((n, len(coalitions)))
    for j, mask in enumerate(coalitions):
        for i in range(n):
            if mask >> i & 1:
                M[i, j] = 1.0
    return M


def test_svd_reconstructs():
    rng = np.random.default_rng(0)
    for shape in [(3, 3), (5, 2), (2, 5)]:
        A = rng.normal(size=shape)
        U, s, Vt = svd(A)
        S = np.zeros(shape)
        np.fill_diagonal(S, s)
        assert np.max(np.abs(U @ S @ Vt - A)) <= 1e-9 * max(1, np.max(np.abs(A)))
        assert np.all(np.diff(s) <= 0)
        assert np.allclose(U @ U.T, np.eye(shape[0]), atol=1e-10)
        assert np.allclose(Vt @ Vt.T, np.eye(shape[1]), atol=1e-10)


def test_svd_simple_values():
    assert np.allclose(svd(np.eye(3)).s, [1, 1, 1])
    assert np.allclose(svd(np.diag([3.0, 0.0])).s, [3, 0])


def test_svd_two_player_coalitions_nonsingular():
    # {12, 13, 23} on three players: determinant is 2, so no zero singular value.
    M = indicator_matrix([0b011, 0b101, 0b110], 3)
    assert np.all(svd(M).s > 0)


def test_pseudoinverse_diagonal():
    assert np.allclose(pseudoinverse(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))


def test_pseudoinverse_rank_one():
    A = np.ones((2, 2))
    assert np.allclose(pseudoinverse(A), np.full((2, 2), 0.25))


def test_pseudoinverse_of_invertible():
    rng = np.random.default_rng(1)
    A = rng.normal(size=(4, 4)) + 4 * np.eye(4)
    assert np.allclose(pseudoinverse(A) @ A, np.eye(4), atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 20), st.integers(1, 20), st.booleans())
def test_penrose_identities(seed, m, n, degenerate):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(m, n))
    if degenerate and min(m, n) > 1:
        A[:, -1] = A[:, 0]  # force a rank drop
    P = pseudoinverse(A)
    scale = max(1.0, np.max(np.abs(A)))
    assert np.max(np.abs(A @ P @ A - A)) <= 1e-8 * scale
    assert np.max(np.abs(P @ A @ P - P)) <= 1e-8 * max(1.0, np.max(np.abs(P)))
    assert np.max(np.abs((A @ P).T - A @ P)) <= 1e-8
    assert np.max(np.abs((P @ A).T - P @ A)) <= 1e-8


def test_solve_identity():
    res = solve(np.eye(3), [1.0, 2.0, 3.0])
    assert not res.singular
    assert np.allclose(res.x, [1, 2, 3])


def test_solve_balancing_systems():
    # Three two-player coalitions: each player covered twice, weights 1/2.
    M = indicator_matrix([0b011, 0b101, 0b110], 3)
    res = solve(M, np.ones(3))
    assert not res.singular
    assert np.allclose(res.x, [0.5, 0.5, 0.5])
    # Partition into singletons: weights are all 1.
    res = solve(np.eye(3), np.ones(3))
    assert np.allclose(res.x, [1, 1, 1])


def test_solve_singular_returns_min_norm():
    A = np.array([[1.0, 1.0], [1.0, 1.0]])
    res = solve(A, [2.0, 2.0])
    assert res.singular
    # Minimum-norm solution of x1 + x2 = 2.
    assert np.allclose(res.x, [1.0, 1.0])


def test_solve_residual_bound():
    rng = np.random.default_rng(2)
    for _ in range(20):
        A = rng.normal(size=(6, 6)) + 3 * np.eye(6)
        b = rng.normal(size=6)
        res = solve(A, b)
        norm = np.linalg.norm(A) * np.linalg.norm(res.x) + np.linalg.norm(b)
        assert np.max(np.abs(A @ res.x - b)) <= 1e-9 * norm


def test_rank_basic():
    assert rank(np.zeros((3, 3))) == 0
    assert rank(indicator_matrix([1, 2, 4], 3)) == 3
    assert rank(indicator_matrix([0b011, 0b101, 0b110], 3)) == 3
    assert rank(indicator_matrix([0b011, 0b101, 0b110, 0b111], 3)) == 3


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_rank_permutation_invariant(seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(5, 4))
    A[:, 3] = A[:, 0] - A[:, 1]
    r = rank(A)
    assert r == rank(A[rng.permutation(5)])
    assert r == rank(A[:, rng.permutation(4)])


def test_solve_rejects_rectangular():
    with pytest.raises(ValueError):
        solve(np.ones((2, 3)), np.ones(2))
