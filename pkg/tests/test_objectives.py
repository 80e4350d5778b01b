import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from barriersub.objectives import (
    ConcaveOverModularObjective,
    FacilityLocationObjective,
    LogDetObjective,
    NotPSDError,
    VertexCoverObjective,
    rbf_similarity,
)
from barriersub.verify import FAMILIES, random_instance

from helpers import coverage_value, logdet_reference


def test_vertex_cover_examples():
    star = VertexCoverObjective([[1, 2, 3], [], [], []])
    assert star.value([]) == 0
    assert star.value([0]) == 4


def test_vertex_cover_random_digraph_union():
    rng = np.random.default_rng(3)
    adj = [[v for v in range(8) if v != u and rng.random() < 0.3] for u in range(8)]
    assert VertexCoverObjective(adj).value([2, 5]) == coverage_value(adj, [2, 5])


def test_vertex_cover_weights_and_degree():
    obj = VertexCoverObjective({0: [1], 1: [2]}, weights=[1.0, 2.0, 4.0])
    assert obj.n == 3
    assert obj.value([0]) == 3.0
    assert list(obj.out_degree()) == [1, 1, 0]


def test_logdet_examples():
    diag = LogDetObjective(np.diag([1.0, 2.0]), alpha=1.0)
    assert diag.value([]) == 0.0
    assert diag.value([0, 1]) == pytest.approx(math.log(2) + math.log(3))


def test_logdet_matches_cofactor_on_rbf():
    rng = np.random.default_rng(11)
    M = rbf_similarity(rng.random((5, 3)), 1.0)
    obj = LogDetObjective(M, alpha=0.7)
    assert obj.value([0, 3, 4]) == pytest.approx(logdet_reference(M, 0.7, [0, 3, 4]), rel=1e-10)


def test_logdet_marginals_nonnegative_and_match_ratio():
    rng = np.random.default_rng(5)
    for _ in range(20):
        M = rbf_similarity(rng.random((5, 2)), 2.0)
        obj = LogDetObjective(M, 1.0)
        S = [a for a in range(4) if rng.random() < 0.5]
        gain = obj.value(S + [4]) - obj.value(S)
        ref = logdet_reference(M, 1.0, S + [4]) - logdet_reference(M, 1.0, S)
        assert gain >= -1e-12
        assert gain == pytest.approx(ref, rel=1e-8, abs=1e-12)


def test_logdet_rejects_indefinite_submatrix():
    M = np.array([[1.0, 3.0], [3.0, 1.0]])
    obj = LogDetObjective(M, alpha=1.0)
    with pytest.raises(NotPSDError, match=r"\[0, 1\]"):
        obj.value([0, 1])


def test_logdet_rejects_asymmetric():
    with pytest.raises(ValueError):
        LogDetObjective(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_facility_location_examples():
    M = np.array([[0.5, 0.5, 0.5], [1.0, 0.2, 0.1], [0.0, 0.3, 1.0]])
    obj = FacilityLocationObjective(M)
    assert obj.value([]) == 0.0
    # the constant first row contributes 0.5 to every nonempty S
    for S in ([0], [1], [2], [0, 2], [0, 1, 2]):
        rest = max(M[1, a] for a in S) + max(M[2, a] for a in S)
        assert 3 * obj.value(S) - rest == pytest.approx(0.5)


def test_facility_location_row_max_average():
    rng = np.random.default_rng(2)
    M = rng.random((6, 6))
    obj = FacilityLocationObjective(M)
    expected = sum(max(M[i][1], M[i][4]) for i in range(6)) / 6
    assert obj.value([1, 4]) == pytest.approx(expected, rel=1e-15)


def test_concave_modular_from_documents_dedups_words():
    obj = ConcaveOverModularObjective.from_documents([4.0, 9.0], [["a", "b", "a"], ["b"]])
    assert obj.value([]) == 0
    assert obj.value([0]) == pytest.approx(2 + 2)
    assert obj.value([0, 1]) == pytest.approx(math.sqrt(4) + math.sqrt(13))


def test_rbf_similarity_examples():
    assert np.all(rbf_similarity(np.ones((3, 2)), 1.0) == 1.0)
    M = rbf_similarity(np.array([[0.0], [math.log(2)]]), 1.0)
    assert M[0, 1] == pytest.approx(0.5, rel=1e-15)
    assert M[0, 0] == 1.0


@settings(max_examples=1000, deadline=None)
@given(
    seed=st.integers(0, 2**40),
    family=st.sampled_from(FAMILIES),
    n=st.integers(1, 12),
    data=st.data(),
)
def test_builtins_monotone_and_submodular(seed, family, n, data):
    f = random_instance(seed, n, 1, 0, family).objective
    members = st.lists(st.integers(0, n - 1), unique=True)
    B = data.draw(members)
    A = [a for a in B if data.draw(st.booleans())]
    outside = [a for a in range(n) if a not in B]
    assert f.value([]) == pytest.approx(0.0, abs=1e-12)
    assert f.value(A) <= f.value(B) + 1e-9
    if outside:
        a = data.draw(st.sampled_from(outside))
        assert f.marginal(a, A) >= f.marginal(a, B) - 1e-9
