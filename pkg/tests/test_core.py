import math
import threading

import pytest
from hypothesis import given, settings, strategies as st

from barriersub.core import (
    CountingOracle,
    ModularObjective,
    NegativeValueError,
    RunReport,
    SolutionState,
    SubmodularOracle,
    marginal_gain,
    rebuild_weights,
)
from barriersub.objectives import VertexCoverObjective
from barriersub.verify import FAMILIES, random_instance

from helpers import coverage_value

ADJ_A = [[1, 2], [2], [3], [0]]


def test_rebuild_empty():
    st_ = rebuild_weights(SolutionState(), ModularObjective([1, 2]))
    assert st_.w == {} and st_.fval == 0 and st_.gamma == 0


def test_rebuild_modular_weights_are_singletons():
    st_ = rebuild_weights(SolutionState(S=[2, 0]), ModularObjective([2, 3, 5]))
    assert st_.S == [0, 2]
    assert st_.w == {0: 2.0, 2: 5.0}
    assert st_.fval == 7.0


def test_rebuild_prefix_differences_on_small_coverage(instance_a):
    st_ = rebuild_weights(SolutionState(S=[1, 3]), instance_a.objective, instance_a.knapsacks.gamma)
    assert st_.w[1] == coverage_value(ADJ_A, [1]) - coverage_value(ADJ_A, [])
    assert st_.w[3] == coverage_value(ADJ_A, [1, 3]) - coverage_value(ADJ_A, [1])
    assert st_.gamma == pytest.approx(0.5 + 0.25)


def test_rebuild_uses_prefix_queries_only():
    c = CountingOracle(ModularObjective([1, 1, 1, 1, 1]))
    rebuild_weights(SolutionState(S=[0, 3, 4]), c)
    assert c.calls == 4


def test_marginal_at_empty_is_singleton(instance_a):
    st_ = rebuild_weights(SolutionState(), instance_a.objective)
    for a in range(4):
        assert marginal_gain(a, st_, instance_a.objective) == coverage_value(ADJ_A, [a])


def test_marginal_modular_is_constant():
    f = ModularObjective([2, 3, 5])
    st_ = rebuild_weights(SolutionState(S=[0]), f)
    assert marginal_gain(1, st_, f) == 3


def test_marginal_on_small_coverage(instance_a):
    f = instance_a.objective
    st_ = rebuild_weights(SolutionState(S=[0]), f)
    assert marginal_gain(2, st_, f) == coverage_value(ADJ_A, [0, 2]) - coverage_value(ADJ_A, [0]) == 1


def test_marginal_one_query_and_rejects_members():
    c = CountingOracle(ModularObjective([1, 2, 3]))
    st_ = rebuild_weights(SolutionState(S=[0]), c)
    before = c.calls
    marginal_gain(2, st_, c)
    assert c.calls == before + 1
    with pytest.raises(ValueError):
        marginal_gain(0, st_, c)


class _Negative(SubmodularOracle):
    n = 2

    def value(self, S):
        return -1.0 if S else 0.0


def test_negative_values_raise():
    with pytest.raises(NegativeValueError):
        CountingOracle(_Negative()).value([0])


def test_counting_marginal_counts_two_queries():
    c = CountingOracle(ModularObjective([1, 2]))
    assert c.marginal(1, [0]) == 2
    assert c.calls == 2


def test_counting_is_thread_safe():
    c = CountingOracle(ModularObjective([1.0] * 8))

    def work():
        for _ in range(500):
            c.value([1, 2])

    threads = [threading.Thread(target=work) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert c.calls == 2000


def test_run_report_fields():
    r = RunReport("greedy", (1, 2), 3.0, True, 5, 0.1, {"epsilon": 0.2})
    assert r.set == (1, 2) and r.params["epsilon"] == 0.2


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32), family=st.sampled_from(FAMILIES), data=st.data())
def test_weights_telescope(seed, family, data):
    inst = random_instance(seed, 9, 1, 1, family)
    S = data.draw(st.lists(st.integers(0, 8), unique=True, max_size=9))
    state = rebuild_weights(SolutionState(S=S), inst.objective, inst.knapsacks.gamma)
    total = math.fsum(state.w.values())
    assert total == pytest.approx(inst.objective.value(S), rel=1e-9, abs=1e-12)
    assert state.gamma == math.fsum(inst.knapsacks.gamma[a] for a in S)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32), data=st.data())
def test_counting_changes_no_value(seed, data):
    inst = random_instance(seed, 8, 1, 1, "coverage")
    c = CountingOracle(inst.objective)
    sets = data.draw(st.lists(st.lists(st.integers(0, 7), unique=True), max_size=10))
    for S in sets:
        assert c.value(S) == inst.objective.value(S)
    assert c.calls == len(sets)


def test_vertex_cover_matches_union_reference():
    obj = VertexCoverObjective(ADJ_A)
    for S in ([], [0], [1, 3], [0, 1, 2, 3]):
        assert obj.value(S) == coverage_value(ADJ_A, S)
