import random

import pytest
from hypothesis import given, settings, strategies as st

from plants import brute_min_count, random_plant, random_policy, simple_paths_to_secrets
from secprot.core import PlantError, Policy
from secprot.verify import (
    INFINITY,
    format_path,
    is_m_securely_reachable,
    least_k,
    min_protected_count,
    verify_policy,
)


def levels(plant, k):
    events = plant.alphabet.protectable_up_to(k)
    return lambda q, e: e in events


def protection(**entries):
    return Policy({q: frozenset(es) for q, es in entries.items()}, "protection")


P2 = protection(q0={"sigma0"}, q2={"sigma4", "sigma6"}, q4={"sigma10"})
P3 = protection(q0={"sigma0"}, q1={"sigma2", "sigma8"}, q2={"sigma4", "sigma6"}, q4={"sigma10"})


def test_paper_simple_paths(plant):
    paths = simple_paths_to_secrets(plant)
    assert {tuple(e for _, e, _ in p) for p in paths} == {
        ("sigma0", "sigma2", "sigma6"),
        ("sigma0", "sigma8", "sigma10"),
        ("sigma0", "sigma2", "sigma4", "sigma7"),
    }


@pytest.mark.parametrize("k, expected", [(0, 1), (1, 2), (2, 3)])
def test_min_count_by_level(plant, k, expected):
    assert brute_min_count(plant, levels(plant, k)) == expected
    assert min_protected_count(plant, levels(plant, k)) == expected


def test_min_count_no_secrets(plant):
    assert min_protected_count(plant.replace(secrets=frozenset()), lambda q, e: True) == INFINITY


def test_secure_reachability(plant):
    assert is_m_securely_reachable(plant, 1, 2)
    assert not is_m_securely_reachable(plant, 0, 2)
    free = plant.replace(secrets=frozenset())
    assert all(is_m_securely_reachable(free, k, m) for k in range(3) for m in (1, 5))
    with pytest.raises(PlantError):
        is_m_securely_reachable(plant, 3, 1)


@pytest.mark.parametrize("m, k", [(1, 0), (2, 1), (3, 2), (4, None)])
def test_least_k(plant, m, k):
    assert least_k(plant, m) == k


def test_verify_paper_policies(plant):
    assert verify_policy(plant, P2, 2) == (True, None)
    assert verify_policy(plant, P3, 3) == (True, None)
    assert not verify_policy(plant, P2, 3)[0]


def test_verify_witness(plant):
    ok, path = verify_policy(plant, protection(q0={"sigma0"}), 2)
    assert not ok
    assert format_path("q0", path) == "q0 -sigma0-> q1 -sigma2-> q2 -sigma6-> q5"
    ok, path = verify_policy(plant, Policy({}, "protection"), 1)
    assert format_path("q0", path) == "q0 -sigma0-> q1 -sigma2-> q2 -sigma6-> q5"


@pytest.mark.parametrize(
    "bad",
    [protection(q9={"sigma0"}), protection(q0={"nope"}), protection(q1={"sigma0"}),
     protection(q1={"sigma1"})],
)
def test_verify_rejects_foreign_policy(plant, bad):
    with pytest.raises(PlantError):
        verify_policy(plant, bad, 1)


seeds = st.integers(0, 2**32)


@settings(max_examples=300, deadline=None)
@given(seeds)
def test_zero_one_bfs_matches_enumeration(seed):
    rng = random.Random(seed)
    p = random_plant(rng, max_states=6, max_events=5)
    pol = random_policy(rng, p, 0.5).pairs()
    counted = lambda q, e: (q, e) in pol
    assert min_protected_count(p, counted) == brute_min_count(p, counted)


@settings(max_examples=300, deadline=None)
@given(seeds, st.integers(1, 4))
def test_monotone_in_k_antitone_in_m(seed, m):
    p = random_plant(random.Random(seed))
    for k in range(p.alphabet.levels - 1):
        if is_m_securely_reachable(p, k, m):
            assert is_m_securely_reachable(p, k + 1, m)
    for k in range(p.alphabet.levels):
        if m > 1 and is_m_securely_reachable(p, k, m):
            assert is_m_securely_reachable(p, k, m - 1)


@settings(max_examples=300, deadline=None)
@given(seeds, st.integers(1, 3))
def test_blanket_policy(seed, m):
    p = random_plant(random.Random(seed))
    top = p.alphabet.protectable_up_to(p.alphabet.levels - 1)
    entries = {}
    for s, e, _ in p.transitions:
        if e in top:
            entries.setdefault(s, set()).add(e)
    blanket = Policy({q: frozenset(es) for q, es in entries.items()}, "protection")
    ok, _ = verify_policy(p, blanket, m)
    assert ok == is_m_securely_reachable(p, p.alphabet.levels - 1, m)


@settings(max_examples=300, deadline=None)
@given(seeds, st.integers(1, 3))
def test_witness_validity(seed, m):
    rng = random.Random(seed)
    p = random_plant(rng)
    pol = random_policy(rng, p, 0.5)
    ok, path = verify_policy(p, pol, m)
    if ok:
        return
    q = p.initial
    for src, event, dst in path:
        assert src == q and p.delta[(src, event)] == dst
        q = dst
    assert q in p.secrets
    assert sum(1 for s, e, _ in path if e in pol[s]) < m
