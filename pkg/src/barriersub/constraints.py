"""Matroids, k-matchoids and normalized knapsacks.

A matchoid is a list of matroids, each living on its own ground set ``N_i``;
a set is feasible when its trace on every ``N_i`` is independent there.
Knapsack capacities are always normalized to 1.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import TOL


class MatroidOracle(ABC):
    """Independence oracle for a matroid on ``ground()``."""

    @abstractmethod
    def is_independent(self, S: Iterable[int]) -> bool:
        ...

    @abstractmethod
    def ground(self) -> frozenset[int]:
        ...

    def can_add(self, S: Iterable[int], b: int) -> bool:
        """Whether ``(S + b) ∩ N`` stays independent, for independent ``S ∩ N``."""
        if b not in self.ground():
            return True
        return self.is_independent(self._trace(S) | {b})

    def exchange_options(self, S: Iterable[int], b: int) -> list[int]:
        """Elements ``a`` of ``S`` with ``(S - a + b) ∩ N`` independent."""
        T = self._trace(S)
        out = []
        for a in sorted(T):
            if self.is_independent((T - {a}) | {b}):
                out.append(a)
        return out

    def _trace(self, S: Iterable[int]) -> set[int]:
        g = self.ground()
        return {a for a in S if a in g}


class UniformMatroid(MatroidOracle):
    """At most ``m`` elements of the ground set."""

    def __init__(self, m: int, ground: Iterable[int]):
        if m < 0:
            raise ValueError("uniform matroid limit must be non-negative")
        self.m = int(m)
        self._ground = frozenset(ground)

    def ground(self):
        return self._ground

    def is_independent(self, S):
        return len(self._trace(S)) <= self.m

    def can_add(self, S, b):
        if b not in self._ground:
            return True
        return len(self._trace(S)) + 1 <= self.m

    def exchange_options(self, S, b):
        T = self._trace(S)
        return sorted(T) if len(T) <= self.m else []

    def __repr__(self):
        return f"UniformMatroid(m={self.m}, |N|={len(self._ground)})"


class PartitionMatroid(MatroidOracle):
    """At most ``limits[block]`` elements from each block.

    Elements missing from ``part`` are outside this matroid's ground set.
    Blocks without an entry in ``limits`` use ``default_limit``.
    """

    def __init__(
        self,
        part: Mapping[int, object],
        limits: Mapping[object, int] | None = None,
        default_limit: int | None = None,
    ):
        self.part = dict(part)
        self.limits = dict(limits or {})
        self.default_limit = default_limit
        for blk in set(self.part.values()):
            lim = self.limit(blk)
            if lim < 0:
                raise ValueError(f"negative limit for block {blk!r}")
        self._ground = frozenset(self.part)

    def limit(self, blk) -> int:
        if blk in self.limits:
            return int(self.limits[blk])
        if self.default_limit is None:
            raise ValueError(f"no limit for block {blk!r}")
        return int(self.default_limit)

    def ground(self):
        return self._ground

    def is_independent(self, S):
        counts = Counter(self.part[a] for a in S if a in self.part)
        return all(c <= self.limit(blk) for blk, c in counts.items())

    def can_add(self, S, b):
        if b not in self.part:
            return True
        blk = self.part[b]
        used = sum(1 for a in S if self.part.get(a, _MISSING) == blk)
        return used + 1 <= self.limit(blk)

    def exchange_options(self, S, b):
        blk = self.part[b]
        return sorted(a for a in S if self.part.get(a, _MISSING) == blk)

    def __repr__(self):
        return f"PartitionMatroid(blocks={len(set(self.part.values()))}, |N|={len(self._ground)})"


_MISSING = object()


class FreeMatroid(MatroidOracle):
    """Everything is independent."""

    def __init__(self, ground: Iterable[int]):
        self._ground = frozenset(ground)

    def ground(self):
        return self._ground

    def is_independent(self, S):
        return True

    def can_add(self, S, b):
        return True

    def exchange_options(self, S, b):
        return sorted(self._trace(S))


class ContractedMatroid(MatroidOracle):
    """Contraction of ``inner`` by ``A``: ``T`` is independent iff ``T ∪ A`` is."""

    def __init__(self, inner: MatroidOracle, A: Iterable[int], drop: Iterable[int] = ()):
        self.inner = inner
        self.A = frozenset(A) & inner.ground()
        self._ground = inner.ground() - self.A - frozenset(drop)

    def ground(self):
        return self._ground

    def is_independent(self, S):
        return self.inner.is_independent(self._trace(S) | self.A)

    def can_add(self, S, b):
        if b not in self._ground:
            return True
        return self.inner.can_add(self._trace(S) | self.A, b)

    def exchange_options(self, S, b):
        opts = self.inner.exchange_options(self._trace(S) | self.A, b)
        return [a for a in opts if a not in self.A]


class MatchoidConstraint:
    """Matroids on overlapping ground sets; each element in at most ``k`` of them."""

    def __init__(self, matroids: Sequence[MatroidOracle], k: int | None = None):
        self.matroids = list(matroids)
        overlap = Counter()
        for M in self.matroids:
            overlap.update(M.ground())
        self.overlap = max(overlap.values(), default=0)
        if k is None:
            k = self.overlap
        elif self.overlap > k:
            raise ValueError(f"an element lies in {self.overlap} ground sets, more than k={k}")
        self.k = int(k)
        self._members: dict[int, list[int]] = {}
        for i, M in enumerate(self.matroids):
            for a in M.ground():
                self._members.setdefault(a, []).append(i)

    def containing(self, a: int) -> list[int]:
        """Indices of the matroids whose ground set holds ``a``."""
        return self._members.get(a, [])

    def feasible(self, S: Iterable[int]) -> bool:
        S = list(S)
        return all(M.is_independent(S) for M in self.matroids)

    def can_add(self, S: Iterable[int], b: int) -> bool:
        return all(self.matroids[i].can_add(S, b) for i in self.containing(b))

    def violated_by(self, S: Iterable[int], b: int) -> list[int]:
        """Matroids ``i`` with ``(S + b) ∩ N_i`` dependent."""
        return [i for i in self.containing(b) if not self.matroids[i].can_add(S, b)]

    def __repr__(self):
        return f"MatchoidConstraint(k={self.k}, matroids={self.matroids!r})"


@dataclass
class KnapsackSet:
    """``costs[i, a]`` is the normalized cost of ``a`` in knapsack ``i``."""

    costs: np.ndarray
    gamma: np.ndarray = field(init=False)

    def __post_init__(self):
        self.costs = np.asarray(self.costs, dtype=float)
        if self.costs.ndim == 1:
            self.costs = self.costs.reshape(1, -1)
        if self.costs.ndim != 2:
            raise ValueError("knapsack costs must be a 2-d array (ell x n)")
        if np.any(self.costs < 0):
            raise ValueError("knapsack costs must be non-negative")
        self.gamma = self.costs.sum(axis=0) if self.ell else np.zeros(self.costs.shape[1])

    @classmethod
    def empty(cls, n: int) -> "KnapsackSet":
        return cls(np.zeros((0, n)))

    @property
    def ell(self) -> int:
        return self.costs.shape[0]

    @property
    def n(self) -> int:
        return self.costs.shape[1]

    def load(self, S: Iterable[int]) -> np.ndarray:
        idx = list(S)
        if not idx:
            return np.zeros(self.ell)
        return self.costs[:, idx].sum(axis=1)

    def feasible(self, S: Iterable[int]) -> bool:
        return bool(np.all(self.load(S) <= 1 + TOL))

    def aggregate(self, S: Iterable[int]) -> float:
        return math.fsum(self.gamma[a] for a in S)


def normalize(costs, budgets) -> KnapsackSet:
    """Divide each raw cost vector by its budget."""
    costs = np.atleast_2d(np.asarray(costs, dtype=float))
    budgets = np.atleast_1d(np.asarray(budgets, dtype=float))
    if costs.shape[0] != budgets.shape[0]:
        raise ValueError(f"{costs.shape[0]} cost vectors but {budgets.shape[0]} budgets")
    if np.any(costs < 0):
        raise ValueError("negative cost")
    if np.any(budgets <= 0):
        raise ValueError("budgets must be positive")
    return KnapsackSet(costs / budgets[:, None])


def pad_constraints(
    matroids: Sequence[MatroidOracle] | MatchoidConstraint,
    knapsacks: KnapsackSet,
    n: int | None = None,
) -> tuple[MatchoidConstraint, KnapsackSet, int]:
    """Balance the two constraint families so that ``ell == k``.

    Missing knapsacks are all-zero vectors; missing matroid overlap is made up
    with free matroids over the whole ground set. Neither changes which sets
    are feasible.
    """
    matchoid = matroids if isinstance(matroids, MatchoidConstraint) else MatchoidConstraint(matroids)
    if n is None:
        n = knapsacks.n
    k0, l0 = matchoid.k, knapsacks.ell
    k = max(k0, l0)
    if l0 < k:
        knapsacks = KnapsackSet(np.vstack([knapsacks.costs, np.zeros((k - l0, n))]))
    if k0 < k:
        everything = range(n)
        mats = matchoid.matroids + [FreeMatroid(everything) for _ in range(k - k0)]
        matchoid = MatchoidConstraint(mats, k=k)
    return matchoid, knapsacks, k


def exchange_candidate(
    S: Iterable[int],
    b: int,
    matchoid: MatchoidConstraint,
    delta: Mapping[int, float],
) -> frozenset[int] | None:
    """Cheapest per-matroid removals that make ``(S - U) + b`` feasible.

    For each matroid violated by adding ``b``, the removable element with the
    smallest ``delta`` is taken (ties to the smaller index). Returns ``None``
    when some violated matroid offers no single-element exchange.
    """
    S = list(S)
    U = set()
    for i in matchoid.violated_by(S, b):
        options = matchoid.matroids[i].exchange_options(S, b)
        if not options:
            return None
        U.add(min(options, key=lambda a: (delta[a], a)))
    return frozenset(U)


def max_feasible_cardinality(
    matchoid: MatchoidConstraint,
    knapsacks: KnapsackSet,
    elements: Iterable[int] | None = None,
) -> int:
    """Size of the maximal feasible set found by one scan in index order."""
    if elements is None:
        elements = range(knapsacks.n)
    S: list[int] = []
    load = np.zeros(knapsacks.ell)
    for a in sorted(elements):
        new = load + knapsacks.costs[:, a]
        if np.all(new <= 1 + TOL) and matchoid.can_add(S, a):
            S.append(a)
            load = new
    return len(S)


def cardinality_upper_bound(
    matchoid: MatchoidConstraint,
    knapsacks: KnapsackSet,
    elements: Iterable[int] | None = None,
) -> int:
    """An upper bound on the largest feasible set.

    A maximal independent set of a k-matchoid is at least 1/k of a maximum one,
    and no knapsack fits more than its cheapest elements summing to 1.
    """
    elements = sorted(range(knapsacks.n) if elements is None else elements)
    if not elements:
        return 0
    bound = len(elements)
    if matchoid.matroids:
        free = KnapsackSet.empty(knapsacks.n)
        maximal = max_feasible_cardinality(matchoid, free, elements)
        bound = min(bound, max(matchoid.k, 1) * maximal)
    for i in range(knapsacks.ell):
        c = np.sort(knapsacks.costs[i, elements])
        fit = int(np.searchsorted(np.cumsum(c), 1 + TOL, side="right"))
        bound = min(bound, fit)
    return bound
