import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dgw.errors import Inconsistent
from dgw.fields import build_extension
from dgw.gflinalg import AffineSolver, matmul_mod, nullspace, rref
from dgw.gfmatrix import (charpoly, identity, is_invertible, mat_det, mat_inv, mat_mul,
                          semilinear_residual, solve_affine_semilinear)


def _naive_matmul(a, b, p):
    return np.array([[sum(int(a[i, l]) * int(b[l, j]) for l in range(a.shape[1])) % p
                      for j in range(b.shape[1])] for i in range(a.shape[0])], dtype=np.int64)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3, 5, 7, 101]), st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**31))
def test_matmul_mod(p, m, n, seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, p, (m, n))
    b = rng.integers(0, p, (n, m))
    assert np.array_equal(matmul_mod(a, b, p), _naive_matmul(a, b, p))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(1, 7), st.integers(1, 7), st.integers(0, 2**31))
def test_rref_and_nullspace(p, m, n, seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, p, (m, n))
    r, piv, t = rref(a, p, transform=True)
    assert np.array_equal(matmul_mod(t, a, p), r)
    ker = nullspace(a, p)
    assert ker.shape == (n - len(piv), n)
    if len(ker):
        assert not matmul_mod(a, ker.T, p).any()
        assert len(rref(ker, p)[1]) == len(ker)


def test_affine_solver_consistency():
    p = 5
    a = np.array([[1, 2, 0], [2, 4, 0]])
    s = AffineSolver(a, p)
    x = s.solve(np.array([3, 1]))
    assert np.array_equal(matmul_mod(a, x, p), [3, 1])
    with pytest.raises(Inconsistent):
        s.solve(np.array([1, 1]))
    assert s.kernel.shape == (2, 3)


def _random_matrix(ctx, n, rng):
    return rng.integers(0, ctx.p, (n, n, ctx.k))


def test_inverse_and_determinant():
    ctx = build_extension(3, 1, 4)
    rng = np.random.default_rng(5)
    hits = 0
    for _ in range(30):
        a = _random_matrix(ctx, 3, rng)
        if not is_invertible(ctx, a):
            assert not mat_det(ctx, a).any()
            continue
        hits += 1
        inv = mat_inv(ctx, a)
        assert np.array_equal(mat_mul(ctx, a, inv), identity(ctx, 3))
        b = _random_matrix(ctx, 3, rng)
        assert np.array_equal(mat_det(ctx, mat_mul(ctx, a, b)),
                              ctx.mul(mat_det(ctx, a), mat_det(ctx, b)))
    assert hits > 10


def test_charpoly_kills_matrix():
    ctx = build_extension(5, 1, 3)
    rng = np.random.default_rng(6)
    a = _random_matrix(ctx, 3, rng)
    cp = charpoly(ctx, a)
    acc = ctx.zeros((3, 3))
    power = identity(ctx, 3)
    for c in cp:
        acc = ctx.add(acc, ctx.mul(c, power))
        power = mat_mul(ctx, power, a)
    assert not acc.any()


def test_semilinear_solutions_are_exact():
    ctx = build_extension(3, 1, 6)
    rng = np.random.default_rng(7)
    solved = 0
    for _ in range(10):
        a = _random_matrix(ctx, 2, rng)
        if not is_invertible(ctx, a):
            continue
        b = _random_matrix(ctx, 2, rng)
        try:
            sol = solve_affine_semilinear(ctx, a, b)
        except Inconsistent:
            continue
        solved += 1
        assert not semilinear_residual(ctx, a, b, sol.particular).any()
        zero = ctx.zeros((2, 2))
        for z in sol.basis:
            assert not semilinear_residual(ctx, a, zero, z).any()
    assert solved


def test_semilinear_substitution_matches_elimination():
    # with a fundamental solution the Artin-Schreier path gives the same solution set
    ctx = build_extension(2, 1, 4)
    a = identity(ctx, 2)
    rng = np.random.default_rng(8)
    b = ctx.frob(_random_matrix(ctx, 2, rng), 1)
    b = ctx.sub(b, ctx.frob(b, 1))  # forces solvability: Z = -b' with b = b' - b'^q
    full = solve_affine_semilinear(ctx, a, b)
    fast = solve_affine_semilinear(ctx, a, b, fundamental=identity(ctx, 2))
    assert full.homogeneous_dim == fast.homogeneous_dim == 4
    assert not semilinear_residual(ctx, a, b, fast.particular).any()
