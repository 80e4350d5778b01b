from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .constraints import KnapsackSet, MatchoidConstraint
from .core import TOL, SubmodularOracle


@dataclass
class ProblemInstance:
    """Objective plus a k-matchoid and normalized knapsacks over ``0..n-1``.

    ``ground`` optionally restricts the usable elements. Elements that are
    infeasible on their own (a knapsack cost above 1, or a loop of some
    matroid) are dropped from ``elements`` at construction.
    """

    objective: SubmodularOracle
    matchoid: MatchoidConstraint
    knapsacks: KnapsackSet
    ground: tuple[int, ...] | None = None
    name: str = ""
    elements: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        n = self.objective.n
        if self.knapsacks.n != n:
            raise ValueError(f"knapsack costs cover {self.knapsacks.n} elements, objective has {n}")
        for M in self.matchoid.matroids:
            if any(a < 0 or a >= n for a in M.ground()):
                raise ValueError("matroid ground set refers to elements outside 0..n-1")
        candidates = range(n) if self.ground is None else sorted(set(self.ground))
        costs = self.knapsacks.costs
        keep = []
        for a in candidates:
            if self.knapsacks.ell and np.any(costs[:, a] > 1 + TOL):
                continue
            if not self.matchoid.can_add((), a):
                continue
            keep.append(a)
        self.elements = tuple(keep)

    @property
    def n(self) -> int:
        return self.objective.n

    @property
    def k(self) -> int:
        return self.matchoid.k

    @property
    def ell(self) -> int:
        return self.knapsacks.ell

    def feasible(self, S: Iterable[int]) -> bool:
        S = list(S)
        if len(set(S)) != len(S):
            return False
        return self.matchoid.feasible(S) and self.knapsacks.feasible(S)
