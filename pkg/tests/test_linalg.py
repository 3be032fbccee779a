from __future__ import annotations

import itertools
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from evasive.errors import NotSquare
from evasive.field import GF
from evasive.linalg import (
    Mat,
    det,
    intersect_rowspaces,
    kernel_basis,
    kernel_mod_p,
    rank,
    rank_mod_p,
    batch_rank_mod_p,
    rref,
    solve,
    sum_rowspaces,
)

FIELDS = [GF(2), GF(3), GF(2, 3), GF(3, 2), GF(5, 2)]


def rand_mat(F, r, c, rng, density=1.0):
    return Mat(F, [[rng.randrange(F.order) if rng.random() < density else 0 for _ in range(c)]
                   for _ in range(r)], c)


def minor_rank(F, A):
    """Largest k with a nonzero k x k minor."""
    for k in range(min(A.rows, A.cols), 0, -1):
        for rs in itertools.combinations(range(A.rows), k):
            for cs in itertools.combinations(range(A.cols), k):
                if det(Mat(F, [[A.entries[i][j] for j in cs] for i in rs], k)).code:
                    return k
    return 0


def test_identity_and_zero():
    F = GF(3, 2)
    I = Mat.identity(F, 4)
    R, rk, piv = rref(I)
    assert R == I and rk == 4 and piv == [0, 1, 2, 3]
    assert det(I) == F.one
    Z = Mat.zeros(F, 3, 5)
    R, rk, _ = rref(Z)
    assert rk == 0 and R == Z
    assert kernel_basis(Z).rows == 5
    assert kernel_basis(I).rows == 0


def test_empty_conventions():
    F = GF(2)
    assert det(Mat(F, [], 0)) == F.one
    assert rank(Mat(F, [], 3)) == 0


def test_equal_rows_det_zero_and_not_square():
    F = GF(5, 2)
    rng = random.Random(0)
    A = rand_mat(F, 4, 4, rng)
    A.entries[2] = list(A.entries[0])
    assert det(A) == F.zero
    with pytest.raises(NotSquare):
        det(rand_mat(F, 2, 3, rng))


@given(st.integers(0, 10 ** 6))
def test_rank_matches_minor_rank_gf2(seed):
    rng = random.Random(seed)
    F = GF(2)
    A = rand_mat(F, 4, 6, rng, density=0.4)
    assert rank(A) == minor_rank(F, A)


@given(st.integers(0, 10 ** 6), st.sampled_from(FIELDS))
def test_rref_idempotent_and_kernel(seed, F):
    rng = random.Random(seed)
    A = rand_mat(F, rng.randrange(1, 6), rng.randrange(1, 7), rng, density=0.6)
    R, rk, piv = rref(A)
    R2, rk2, piv2 = rref(R)
    assert R2 == R and rk2 == rk and piv2 == piv
    K = kernel_basis(A)
    assert K.rows == A.cols - rk
    for v in K.entries:
        for row in A.entries:
            acc = 0
            for a, x in zip(row, v):
                acc = F.add(acc, F.mul(a, x))
            assert acc == 0


@given(st.integers(0, 10 ** 6), st.sampled_from(FIELDS))
def test_det_multiplicative(seed, F):
    rng = random.Random(seed)
    n = rng.randrange(1, 5)
    A, B = rand_mat(F, n, n, rng), rand_mat(F, n, n, rng)
    assert det(A @ B) == det(A) * det(B)


@given(st.integers(0, 10 ** 6), st.sampled_from(FIELDS))
def test_solve_substitution(seed, F):
    rng = random.Random(seed)
    A = rand_mat(F, rng.randrange(1, 5), rng.randrange(1, 5), rng, density=0.7)
    b = [rng.randrange(F.order) for _ in range(A.rows)]
    x = solve(A, b)
    if x is None:
        # inconsistent: b is outside the column space
        aug = Mat(F, [list(r) + [bi] for r, bi in zip(A.entries, b)], A.cols + 1)
        assert rank(aug) > rank(A)
    else:
        for row, bi in zip(A.entries, b):
            acc = F.zero
            for a, xi in zip(row, x):
                acc = acc + F(a) * xi
            assert acc.code == bi


def test_kernel_nullity_gf3_many():
    F = GF(3)
    rng = random.Random(5)
    for _ in range(200):
        A = rand_mat(F, rng.randrange(1, 6), rng.randrange(1, 6), rng, density=0.5)
        assert kernel_basis(A).rows + rank(A) == A.cols


def test_grassmann_identity_gf2():
    F = GF(2)
    rng = random.Random(7)
    for _ in range(200):
        A = rand_mat(F, rng.randrange(1, 5), 6, rng, 0.5)
        B = rand_mat(F, rng.randrange(1, 5), 6, rng, 0.5)
        assert rank(A) + rank(B) == rank(sum_rowspaces(A, B)) + intersect_rowspaces(A, B).rows
    A = rand_mat(F, 3, 6, rng)
    assert rref(intersect_rowspaces(A, A))[0] == rref(A)[0]
    E1 = Mat(F, [[1, 0, 0]], 3)
    E2 = Mat(F, [[0, 1, 0]], 3)
    assert intersect_rowspaces(E1, E2).rows == 0


@pytest.mark.parametrize("p", [2, 3, 5])
def test_mod_p_helpers(p):
    rng = np.random.default_rng(p)
    A = rng.integers(0, p, size=(40, 5, 9))
    ranks = batch_rank_mod_p(A, p)
    assert ranks.tolist() == [rank_mod_p(a, p) for a in A]
    K = kernel_mod_p(A[0], p)
    assert not ((A[0] @ K.T) % p).any()
    assert K.shape[0] == 9 - ranks[0]
