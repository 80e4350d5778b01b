"""Exhaustive optimum, ratio checks and reproducible random instances."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .constraints import (
    KnapsackSet,
    MatchoidConstraint,
    PartitionMatroid,
    UniformMatroid,
    normalize,
)
from .core import RunReport
from .instance import ProblemInstance
from .objectives import (
    ConcaveOverModularObjective,
    FacilityLocationObjective,
    LogDetObjective,
    VertexCoverObjective,
    rbf_similarity,
)

MAX_BRUTE_N = 20
FAMILIES = ("coverage", "facility", "logdet", "concave-modular")


@dataclass
class ExhaustiveResult:
    opt_value: float
    opt_sets: list[tuple[int, ...]] = field(default_factory=list)
    feasible_count: int = 0

    @property
    def min_opt_size(self) -> int:
        return min(len(s) for s in self.opt_sets)


def brute_force_opt(instance: ProblemInstance, rel_tol: float = 1e-12) -> ExhaustiveResult:
    """Enumerate every subset and keep the best feasible ones.

    Sets within ``rel_tol`` (relative) of the maximum all count as optimal.
    """
    n = instance.n
    if n > MAX_BRUTE_N:
        raise ValueError(f"brute force is limited to n <= {MAX_BRUTE_N}, got {n}")
    f = instance.objective
    values = []
    count = 0
    for size in range(n + 1):
        for S in itertools.combinations(range(n), size):
            if not instance.feasible(S):
                continue
            count += 1
            values.append((f.value(S), S))
    best = max(v for v, _ in values)
    slack = rel_tol * max(1.0, abs(best))
    opt_sets = [S for v, S in values if v >= best - slack]
    return ExhaustiveResult(best, opt_sets, count)


def check_ratio(report: RunReport, oracle: ExhaustiveResult, bound: float) -> bool:
    return report.objective >= oracle.opt_value / bound - 1e-9


class SplitMix64:
    """The splitmix64 generator: 64-bit state, one multiply-xorshift output step.

    Chosen for its short, language-neutral definition so that generated
    fixtures can be reproduced anywhere.
    """

    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self.MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self.MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] (inclusive)."""
        return lo + self.next_u64() % (hi - lo + 1)

    def sample(self, population, k: int) -> list:
        pool = list(population)
        out = []
        for _ in range(min(k, len(pool))):
            out.append(pool.pop(self.randint(0, len(pool) - 1)))
        return out


def _objective(family, rng, n):
    if family == "coverage":
        adj = [[v for v in range(n) if v != u and rng.random() < 0.3] for u in range(n)]
        weights = [rng.uniform(0.5, 1.5) for _ in range(n)]
        return VertexCoverObjective(adj, weights)
    if family in ("facility", "logdet"):
        X = np.array([[rng.random() for _ in range(2)] for _ in range(n)]).reshape(n, 2)
        M = rbf_similarity(X, lam=2.0) if n else np.zeros((0, 0))
        return FacilityLocationObjective(M) if family == "facility" else LogDetObjective(M, alpha=1.0)
    if family == "concave-modular":
        words = 6
        score = np.zeros((words, n))
        for e in range(n):
            val = rng.uniform(1.0, 10.0)
            for w in rng.sample(range(words), rng.randint(1, 3)):
                score[w, e] = val
        return ConcaveOverModularObjective(score)
    raise ValueError(f"unknown instance family {family!r}; expected one of {_FAMILY_NAMES}")


_FAMILY_NAMES = ", ".join(FAMILIES)


def random_instance(seed: int, n: int, k: int, ell: int, family: str = "coverage") -> ProblemInstance:
    """Deterministic instance with ``k`` matroids (overlap at most ``k``) and ``ell`` knapsacks.

    The first matroid is uniform over everything; the others are partition
    matroids on random subsets. Raw costs are uniform and rescaled so the mean
    singleton cost is ``4 / n``.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown instance family {family!r}; expected one of {_FAMILY_NAMES}")
    if k < 1 or ell < 0 or n < 0:
        raise ValueError("need k >= 1, ell >= 0, n >= 0")
    rng = SplitMix64(seed)
    objective = _objective(family, rng, n)
    matroids = [UniformMatroid(rng.randint(2, max(2, n // 2 + 1)), range(n))]
    for _ in range(k - 1):
        members = [a for a in range(n) if rng.random() < 0.75]
        blocks = rng.randint(2, 3)
        part = {a: rng.randint(0, blocks - 1) for a in members}
        limits = {b: rng.randint(1, 3) for b in range(blocks)}
        matroids.append(PartitionMatroid(part, limits))
    raw = np.array([[rng.random() for _ in range(n)] for _ in range(ell)]).reshape(ell, n)
    if ell and n:
        means = raw.mean(axis=1)
        means[means == 0] = 1.0
        costs = raw / means[:, None] * (4.0 / n)
        knapsacks = KnapsackSet(costs)
    else:
        knapsacks = KnapsackSet(np.zeros((ell, n)))
    return ProblemInstance(
        objective, MatchoidConstraint(matroids, k=k), knapsacks,
        name=f"random:{family}:seed={seed}:n={n}:k={k}:ell={ell}",
    )


def inst_a() -> ProblemInstance:
    """Small coverage instance shared by the unit tests.

    Digraph 0->{1,2}, 1->{2}, 2->{3}, 3->{0} with unit weights; at most two
    elements; one knapsack with raw costs (3, 2, 2, 1) and budget 4.
    """
    adj = [[1, 2], [2], [3], [0]]
    objective = VertexCoverObjective(adj)
    knapsacks = normalize([[3, 2, 2, 1]], [4])
    return ProblemInstance(objective, MatchoidConstraint([UniformMatroid(2, range(4))]), knapsacks, name="INST-A")
