from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from evasive.constructions import gabidulin, subgeometry
from evasive.errors import BudgetExceeded, NotSpanning, ParamError, StrategyInapplicable
from evasive.evasive_check import (
    EvasivenessCertificate,
    fiber_counts,
    intersection_dim,
    is_evasive,
    profile,
    q_system_params,
    sampled_profile,
    verify_certificate,
)
from evasive.subspaces import FqnSubspace, FqSubspace, ambient, enumerate_h_subspaces, expand, fqn_span_dim

SMALL = [(2, 2, 2), (2, 3, 2), (3, 2, 2), (2, 2, 3)]


def rand_subspace(amb, t, rng):
    return FqSubspace(amb, [tuple(rng.randrange(amb.big.order) for _ in range(amb.r)) for _ in range(t)])


def brute_force(U, h):
    return max(intersection_dim(U, W) for W in enumerate_h_subspaces(U.ambient, h))


@given(st.integers(0, 10 ** 6), st.sampled_from(SMALL))
def test_strategies_agree(seed, qnr):
    amb = ambient(*qnr)
    rng = random.Random(seed)
    U = rand_subspace(amb, rng.randrange(1, amb.dim_q + 1), rng)
    span = fqn_span_dim(amb, U.basis)
    for h in range(1, span + 1):
        a = profile(U, h, "full_enum").k_star
        b = profile(U, h, "span_enum").k_star
        assert a == b
        if h == 1:
            assert profile(U, 1, "fiber").k_star == a


def test_against_exact_intersection_oracle():
    amb = ambient(2, 2, 3)
    rng = random.Random(4)
    for _ in range(10):
        U = rand_subspace(amb, 3, rng)
        for h in (1, 2):
            if fqn_span_dim(amb, U.basis) >= h:
                assert profile(U, h).k_star == brute_force(U, h)


def test_whole_space_and_lines():
    amb = ambient(2, 2, 2)
    V = amb.whole()
    c = profile(V, 1)
    assert c.k_star == 2
    ok, _ = is_evasive(V, 1, 1)
    assert not ok
    U = gabidulin(2, 3, 2)
    dims = [intersection_dim(U, W) for W in enumerate_h_subspaces(U.ambient, 1)]
    assert max(dims) == 1 and len(dims) == 9


def test_small_dimension_is_always_evasive():
    amb = ambient(2, 3, 3)
    U = FqSubspace(amb, [(1, 0, 0), (0, 1, 0)])
    assert is_evasive(U, 2, 2)[0]


def test_subgeometry_m2():
    assert profile(subgeometry(2, 4, 2, 2), 1).k_star == 2


def test_fiber_sizes_are_q_powers():
    amb = ambient(3, 2, 2)
    rng = random.Random(5)
    U = rand_subspace(amb, 3, rng)
    _, counts, _ = fiber_counts(U)
    assert counts.sum() == 3 ** U.t - 1
    for c in counts.tolist():
        j = 0
        while 3 ** j - 1 < c:
            j += 1
        assert 3 ** j - 1 == c


def test_monotone_in_h_and_under_inclusion():
    amb = ambient(2, 2, 3)
    rng = random.Random(6)
    for _ in range(10):
        U = rand_subspace(amb, 4, rng)
        ks = [profile(U, h).k_star for h in range(1, fqn_span_dim(amb, U.basis) + 1)]
        assert ks == sorted(ks) and ks[-1] <= U.t
        assert all(k >= h for h, k in enumerate(ks, start=1))
        Usub = FqSubspace(amb, list(U.basis)[:2])
        assert profile(Usub, 1).k_star <= ks[0]


def test_downward_closure():
    U = gabidulin(2, 5, 3)
    k2 = profile(U, 2).k_star
    assert profile(U, 1).k_star <= k2 - 1


def test_errors():
    amb = ambient(2, 2, 2)
    U = FqSubspace(amb, [(1, 0)])
    with pytest.raises(NotSpanning):
        profile(U, 2)
    with pytest.raises(ParamError):
        profile(U, 3)
    with pytest.raises(StrategyInapplicable):
        profile(gabidulin(2, 3, 3), 2, "fiber")
    with pytest.raises(BudgetExceeded):
        profile(gabidulin(2, 5, 3), 2, "full_enum", budget=10)


def test_certificate_roundtrip_and_witness():
    U = gabidulin(2, 5, 3)
    c = profile(U, 2)
    assert c.k_star == 2 and c.examined == 1057 and c.strategy == "full_enum"
    c2 = EvasivenessCertificate.from_json(c.to_json())
    assert c2.k_star == c.k_star and c2.witness == c.witness
    assert verify_certificate(U, c2)
    assert "ms" not in c.to_json(timing=False)


def test_jobs_do_not_change_certificate():
    U = gabidulin(2, 5, 3)
    a = profile(U, 2, "full_enum", jobs=1).to_json(timing=False)
    b = profile(U, 2, "full_enum", jobs=2).to_json(timing=False)
    assert a == b


def test_sampled_profile_lower_bound():
    U = gabidulin(2, 5, 3)
    s = sampled_profile(U, 2, 300, seed=1)
    assert s["max_observed"] <= 2 and sum(s["histogram"].values()) == 300
    W = FqnSubspace.from_json(s["witness"])
    assert intersection_dim(U, W) == s["max_observed"]


def test_q_system_params():
    assert q_system_params(ambient(2, 2, 2).whole()) == (4, 2, 2)
    assert q_system_params(gabidulin(2, 5, 3)) == (5, 3, 3)
    with pytest.raises(NotSpanning):
        q_system_params(FqSubspace(ambient(2, 2, 2), [(1, 0)]))


def test_expand_witness_contains_intersection():
    U = gabidulin(2, 3, 2)
    c = profile(U, 1)
    assert intersection_dim(U, c.witness) == c.k_star
    assert expand(c.witness).t == 3
