from __future__ import annotations

import json
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from evasive.errors import AmbientMismatch, BudgetExceeded
from evasive.subspaces import (
    FqnSubspace,
    FqSubspace,
    ambient,
    count_h_subspaces,
    enumerate_h_subspaces,
    expand,
    fqn_span_dim,
    from_field_model,
    gaussian_binomial,
    intersect,
    load_subspace,
    save_subspace,
    subspace_from_json,
    sum_spaces,
    to_field_model,
)

AMBIENTS = [(2, 2, 2), (2, 3, 2), (3, 2, 2), (2, 2, 3), (4, 2, 2), (2, 3, 3)]


def rand_vec(amb, rng):
    return tuple(rng.randrange(amb.big.order) for _ in range(amb.r))


def rand_subspace(amb, t, rng):
    return FqSubspace(amb, [rand_vec(amb, rng) for _ in range(t)])


def test_gaussian_binomial_values():
    assert gaussian_binomial(2, 1, 8) == 9
    assert gaussian_binomial(3, 1, 32) == 1057
    assert gaussian_binomial(3, 2, 16) == 273
    assert gaussian_binomial(4, 2, 2) == 35


@pytest.mark.parametrize("qnrh,count", [((2, 3, 2, 1), 9), ((2, 5, 3, 1), 1057), ((2, 4, 3, 2), 273),
                                        ((3, 2, 2, 1), 10), ((4, 2, 2, 1), 17), ((2, 2, 3, 2), 21)])
def test_enumeration_count_and_distinct(qnrh, count):
    q, n, r, h = qnrh
    amb = ambient(q, n, r)
    subs = list(enumerate_h_subspaces(amb, h))
    assert len(subs) == count == count_h_subspaces(amb, h)
    assert len({W.sort_key() for W in subs}) == count
    assert all(W.h == h for W in subs)


def test_enumeration_partition_and_budget():
    amb = ambient(2, 3, 3)
    full = [W.sort_key() for W in enumerate_h_subspaces(amb, 2)]
    parts = [W.sort_key() for a, b in [(0, 20), (20, 50), (50, None)]
             for W in enumerate_h_subspaces(amb, 2, start=a, stop=b)]
    assert parts == full
    with pytest.raises(BudgetExceeded):
        list(enumerate_h_subspaces(amb, 2, budget=10))


def test_fq_span_basics():
    amb = ambient(2, 3, 2)
    assert FqSubspace(amb, []).t == 0
    v = (3, 5)
    assert FqSubspace(amb, [v, v]).t == 1
    gv = amb.scale(amb.big.gen.code, v)
    assert FqSubspace(amb, [v, gv]).t == 2
    assert fqn_span_dim(amb, [v, gv]) == 1
    with pytest.raises(AmbientMismatch):
        FqSubspace(amb, [(1, 2, 3)])


def test_fq_span_scalar_multiple_non_prime_q():
    amb = ambient(4, 2, 2)
    v = (5, 9)
    c = amb.fq_scalars()[2]
    assert FqSubspace(amb, [v, amb.scale(c, v)]).t == 1


@given(st.integers(0, 10 ** 6), st.sampled_from(AMBIENTS))
def test_canonical_form_unique(seed, qnr):
    amb = ambient(*qnr)
    rng = random.Random(seed)
    U = rand_subspace(amb, rng.randrange(0, amb.dim_q), rng)
    # a different basis of the same subspace: random invertible combinations
    E = U.elements()
    V = FqSubspace(amb, [tuple(E[rng.randrange(len(E))]) for _ in range(3 * U.t + 2)] + list(U.basis)[::-1])
    assert V.dumps() == U.dumps()


@given(st.integers(0, 10 ** 6), st.sampled_from(AMBIENTS))
def test_elements_closed_and_counted(seed, qnr):
    amb = ambient(*qnr)
    rng = random.Random(seed)
    U = rand_subspace(amb, rng.randrange(0, 4), rng)
    E = U.elements()
    assert len(E) == amb.q ** U.t == len({tuple(x) for x in E.tolist()})
    for _ in range(10):
        x, y = E[rng.randrange(len(E))], E[rng.randrange(len(E))]
        s = tuple(amb.big.add(int(a), int(b)) for a, b in zip(x, y))
        assert U.contains(s)


def test_expand_dimension_and_closure():
    amb = ambient(2, 3, 2)
    assert expand(FqnSubspace(amb, [])).t == 0
    W = FqnSubspace(amb, [(1, 6)])
    E = expand(W)
    assert E.t == 3
    rng = np.random.default_rng(0)
    amb3 = ambient(2, 2, 3)
    from evasive.subspaces import random_h_subspace

    W = random_h_subspace(amb3, 2, rng)
    E = expand(W)
    assert E.t == 4
    for w in W.basis:
        for g in amb3.flatten_basis:
            assert E.contains(amb3.scale(g, w))


def test_sum_intersect_monotone():
    amb = ambient(3, 2, 2)
    rng = random.Random(1)
    for _ in range(30):
        U1 = rand_subspace(amb, 2, rng)
        U2 = FqSubspace(amb, list(U1.basis) + [rand_vec(amb, rng)])
        assert U1.is_subspace_of(U2) and U1.t <= U2.t
        assert intersect(U1, U2) == U1
        V = rand_subspace(amb, 2, rng)
        assert sum_spaces(U1, V).t + intersect(U1, V).t == U1.t + V.t


def test_json_roundtrip(tmp_path):
    amb = ambient(4, 2, 2)
    rng = random.Random(2)
    U = rand_subspace(amb, 3, rng)
    path = tmp_path / "u.json"
    save_subspace(U, str(path))
    assert load_subspace(str(path)) == U
    obj = json.loads(path.read_text())
    assert set(obj) == {"field", "q", "n", "r", "basis"}
    assert subspace_from_json(obj).dumps() == U.dumps()


@pytest.mark.parametrize("qnr", [(2, 5, 3), (3, 2, 2), (4, 2, 2), (2, 3, 2)])
def test_field_model_roundtrip(qnr):
    amb = ambient(*qnr)
    M = amb.field_model
    rng = np.random.default_rng(0)
    V = rng.integers(0, amb.big.order, size=(500, amb.r))
    assert (M.from_field(M.to_field(V)) == V).all()
    assert int(M.to_field(np.zeros((1, amb.r), dtype=np.int64))[0]) == 0
    U = FqSubspace(amb, V[:3].tolist())
    assert from_field_model(amb, to_field_model(U)) == U


def test_field_model_lines_have_equal_directions():
    amb = ambient(2, 5, 3)
    M = amb.field_model
    L = M.L
    rng = random.Random(3)
    for _ in range(50):
        v = rand_vec(amb, rng)
        if not any(v):
            continue
        c = rng.randrange(1, amb.big.order)
        x, y = M.to_field([v, amb.scale(c, v)]).tolist()
        e = 2 ** 5 - 1
        assert L.pow(x, e) == L.pow(y, e)
