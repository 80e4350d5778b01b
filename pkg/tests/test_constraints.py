import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from barriersub.constraints import (
    ContractedMatroid,
    FreeMatroid,
    KnapsackSet,
    MatchoidConstraint,
    PartitionMatroid,
    UniformMatroid,
    cardinality_upper_bound,
    exchange_candidate,
    max_feasible_cardinality,
    normalize,
    pad_constraints,
)
from barriersub.verify import SplitMix64

from helpers import feasible_family


def test_normalize_examples():
    ks = normalize([[2, 4]], [4])
    assert ks.costs.tolist() == [[0.5, 1.0]]
    assert ks.gamma.tolist() == [0.5, 1.0]
    ks = normalize([[1, 1], [2, 0]], [2, 4])
    assert ks.costs.tolist() == [[0.5, 0.5], [0.5, 0.0]]
    assert ks.gamma.tolist() == [1.0, 0.5]


def test_normalize_small_coverage_costs(instance_a):
    assert instance_a.knapsacks.costs.tolist() == [[3 / 4, 2 / 4, 2 / 4, 1 / 4]]


@pytest.mark.parametrize("costs,budgets", [([[-1, 1]], [1]), ([[1, 1]], [0]), ([[1, 1]], [-2]), ([[1]], [1, 2])])
def test_normalize_rejects(costs, budgets):
    with pytest.raises(ValueError):
        normalize(costs, budgets)


def test_knapsack_tolerance_and_gamma_bound():
    ks = KnapsackSet([[0.5, 0.5 + 1e-13, 0.2], [0.1, 0.1, 0.9]])
    assert ks.feasible([0, 1])
    assert not KnapsackSet([[0.5, 0.5 + 1e-9]]).feasible([0, 1])
    for S in itertools.chain.from_iterable(itertools.combinations(range(3), r) for r in range(4)):
        if ks.feasible(S):
            assert ks.aggregate(S) <= ks.ell + 1e-9


def test_matchoid_overlap_validated():
    a = UniformMatroid(1, range(3))
    b = UniformMatroid(1, range(3))
    assert MatchoidConstraint([a, b]).k == 2
    with pytest.raises(ValueError):
        MatchoidConstraint([a, b], k=1)


def test_partition_ground_and_missing_limit():
    P = PartitionMatroid({0: "x", 1: "x", 2: "y"}, {"x": 1, "y": 0})
    assert P.ground() == {0, 1, 2}
    assert P.is_independent([0, 5]) and not P.is_independent([0, 1]) and not P.is_independent([2])
    with pytest.raises(ValueError):
        PartitionMatroid({0: "x"}, {})


# -- padding -----------------------------------------------------------------


def test_pad_adds_zero_knapsack():
    M = MatchoidConstraint([UniformMatroid(2, range(4)), PartitionMatroid({a: a % 2 for a in range(4)}, default_limit=1)])
    mc, ks, k = pad_constraints(M, KnapsackSet(np.full((1, 4), 0.3)))
    assert k == 2 and ks.ell == 2 and np.all(ks.costs[1] == 0) and len(mc.matroids) == 2


def test_pad_balanced_is_unchanged():
    M = MatchoidConstraint([UniformMatroid(2, range(4))])
    ks = KnapsackSet(np.full((1, 4), 0.3))
    mc, ks2, k = pad_constraints(M, ks)
    assert k == 1 and mc is M and ks2 is ks


def test_pad_adds_free_matroids_and_keeps_family():
    rng = np.random.default_rng(0)
    M = MatchoidConstraint([UniformMatroid(3, range(6))])
    ks = KnapsackSet(rng.random((3, 6)) * 0.6)
    mc, ks2, k = pad_constraints(M, ks)
    assert k == 3 and len(mc.matroids) == 3
    assert all(isinstance(x, FreeMatroid) for x in mc.matroids[1:])
    before = feasible_family(lambda S: M.feasible(S) and ks.feasible(S), 6)
    after = feasible_family(lambda S: mc.feasible(S) and ks2.feasible(S), 6)
    assert before == after


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32), ell=st.integers(0, 3))
def test_pad_preserves_feasible_family(seed, ell):
    M, ks = _random_constraints(SplitMix64(seed), 6, ell)
    mc, ks2, k = pad_constraints(M, ks, 6)
    assert ks2.ell == k and mc.k == k
    assert feasible_family(lambda S: M.feasible(S) and ks.feasible(S), 6) == feasible_family(
        lambda S: mc.feasible(S) and ks2.feasible(S), 6
    )


def _random_constraints(rng, n, ell, k=2):
    mats = []
    for _ in range(k):
        members = [a for a in range(n) if rng.random() < 0.7]
        blocks = rng.randint(1, 3)
        mats.append(PartitionMatroid({a: rng.randint(0, blocks - 1) for a in members},
                                     {b: rng.randint(0, 2) for b in range(blocks)}))
    costs = np.array([[rng.uniform(0, 0.7) for _ in range(n)] for _ in range(ell)]).reshape(ell, n)
    return MatchoidConstraint(mats), KnapsackSet(costs)


# -- exchange candidate -----------------------------------------------------


def test_exchange_feasible_addition_is_empty():
    M = MatchoidConstraint([UniformMatroid(3, range(4))])
    assert exchange_candidate([0, 1], 2, M, {0: 1.0, 1: 1.0}) == frozenset()


def test_exchange_uniform_picks_min_delta():
    M = MatchoidConstraint([UniformMatroid(2, range(3))])
    assert exchange_candidate([0, 1], 2, M, {0: 1.0, 1: 0.2}) == {1}


def test_exchange_ties_go_to_smaller_index():
    M = MatchoidConstraint([UniformMatroid(2, range(3))])
    assert exchange_candidate([0, 1], 2, M, {0: 0.5, 1: 0.5}) == {0}


def test_exchange_unusable_element():
    # b is a loop: no single removal helps
    M = MatchoidConstraint([UniformMatroid(0, range(3))])
    assert exchange_candidate([], 2, M, {}) is None


def _brute_exchange(S, b, M, delta):
    """Per violated matroid, the min-delta a (ties to index) with (S - a + b) independent there."""
    U = set()
    for Mi in M.matroids:
        if b not in Mi.ground() or Mi.is_independent(set(S) | {b}):
            continue
        opts = [a for a in S if Mi.is_independent((set(S) - {a}) | {b})]
        U.add(min(opts, key=lambda a: (delta[a], a)))
    return U


def test_exchange_two_overlapping_partitions_matches_enumeration():
    P1 = PartitionMatroid({0: 0, 1: 0, 2: 1, 3: 1, 4: 0}, {0: 1, 1: 1})
    P2 = PartitionMatroid({1: "a", 2: "a", 3: "b", 4: "b", 5: "a"}, {"a": 1, "b": 1})
    M = MatchoidConstraint([P1, P2])
    delta = {a: d for a, d in enumerate([0.3, 0.9, 0.1, 0.4, 0.6, 0.2])}
    family = feasible_family(M.feasible, 6)
    for S in family:
        for b in set(range(6)) - set(S):
            U = exchange_candidate(S, b, M, delta)
            assert U == _brute_exchange(S, b, M, delta)
            assert M.feasible((set(S) - U) | {b})


@settings(max_examples=1000, deadline=None)
@given(seed=st.integers(0, 2**40), n=st.integers(2, 10), k=st.integers(1, 3))
def test_exchange_restores_feasibility(seed, n, k):
    rng = SplitMix64(seed)
    M, _ = _random_constraints(rng, n, 0, k)
    S = []
    for a in rng.sample(range(n), n):
        if M.can_add(S, a):
            S.append(a)
    outside = [a for a in range(n) if a not in S]
    if not outside:
        return
    b = outside[rng.randint(0, len(outside) - 1)]
    delta = {a: rng.uniform(-1, 1) for a in S}
    U = exchange_candidate(S, b, M, delta)
    if U is None:
        assert not M.feasible([b])
        return
    violated = M.violated_by(S, b)
    assert len(U) <= len(violated) <= M.k
    assert M.feasible((set(S) - U) | {b})


# -- matroid axioms ------------------------------------------------------------


def _matroids(rng, n):
    part = {a: rng.randint(0, 2) for a in range(n) if rng.random() < 0.8}
    P = PartitionMatroid(part, {b: rng.randint(0, 2) for b in range(3)})
    U = UniformMatroid(rng.randint(0, n), range(n))
    A = [a for a in range(n) if rng.random() < 0.2]
    return [U, P, FreeMatroid(range(n)), ContractedMatroid(U, A), ContractedMatroid(P, [a for a in A if P.is_independent([a])])]


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**40), n=st.integers(0, 8))
def test_matroid_axioms(seed, n):
    rng = SplitMix64(seed)
    for Mi in _matroids(rng, n):
        ground = sorted(Mi.ground())
        indep = [frozenset(S) for r in range(len(ground) + 1)
                 for S in itertools.combinations(ground, r) if Mi.is_independent(S)]
        if isinstance(Mi, ContractedMatroid) and not Mi.is_independent([]):
            continue  # contraction by a dependent set is not a matroid
        assert frozenset() in indep
        iset = set(indep)
        for B in indep:
            for a in B:
                assert B - {a} in iset
        for A, B in itertools.product(indep, repeat=2):
            if len(A) < len(B):
                assert any(A | {b} in iset for b in B - A)
        for S in indep:
            for b in set(ground) - S:
                assert Mi.can_add(S, b) == ((S | {b}) in iset)


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 2**40), n=st.integers(1, 8))
def test_matchoid_restriction_axioms(seed, n):
    M, _ = _random_constraints(SplitMix64(seed), n, 0, 2)
    for Mi in M.matroids:
        ground = sorted(Mi.ground())
        fam = {frozenset(S) for S in feasible_family(lambda S: M.feasible(S), n)}
        restricted = {S & frozenset(ground) for S in fam}
        for B in restricted:
            for a in B:
                assert B - {a} in restricted


# -- cardinality -------------------------------------------------------------


def test_max_cardinality_examples(instance_a):
    M = MatchoidConstraint([UniformMatroid(3, range(10))])
    assert max_feasible_cardinality(M, KnapsackSet.empty(10)) == 3
    assert max_feasible_cardinality(M, KnapsackSet(np.full((1, 10), 1.5))) == 0
    scan = max_feasible_cardinality(instance_a.matchoid, instance_a.knapsacks)
    true_max = max(len(S) for S in feasible_family(instance_a.feasible, 4))
    assert scan == 2 <= true_max


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**40), n=st.integers(1, 9), ell=st.integers(0, 2))
def test_cardinality_upper_bound_is_valid(seed, n, ell):
    M, ks = _random_constraints(SplitMix64(seed), n, ell)
    true_max = max(len(S) for S in feasible_family(lambda S: M.feasible(S) and ks.feasible(S), n))
    scan = max_feasible_cardinality(M, ks)
    bound = cardinality_upper_bound(M, ks, range(n))
    assert scan <= true_max <= bound
