"""Set-function oracles, call counting and the shared solution bookkeeping.

Elements are the integers ``0..n-1``; their natural order is the global
ordering used to attribute ``f(S)`` to the members of ``S``.
"""

from __future__ import annotations

import math
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# Absolute tolerance for sign tests in algorithmic predicates.
TOL = 1e-12


class NegativeValueError(ValueError):
    """An oracle returned a value below zero."""


class SubmodularOracle(ABC):
    """A non-negative set function over the ground set ``0..n-1``."""

    n: int

    @abstractmethod
    def value(self, S: Iterable[int]) -> float:
        ...

    def marginal(self, a: int, S: Iterable[int]) -> float:
        S = set(S)
        return self.value(S | {a}) - self.value(S)

    def __call__(self, S: Iterable[int]) -> float:
        return self.value(S)


class ModularObjective(SubmodularOracle):
    """``f(S) = sum of v_a over S``; the simplest test objective."""

    def __init__(self, values: Sequence[float]):
        self.values = np.asarray(values, dtype=float)
        if np.any(self.values < 0):
            raise ValueError("modular values must be non-negative")
        self.n = len(self.values)

    def value(self, S):
        idx = list(S)
        return float(self.values[idx].sum()) if idx else 0.0


class CountingOracle(SubmodularOracle):
    """Wraps an oracle and counts value queries.

    ``marginal`` is answered with two value queries so the count always equals
    the number of set evaluations issued. Negative values raise immediately.
    """

    def __init__(self, inner: SubmodularOracle):
        self.inner = inner
        self.n = inner.n
        self.calls = 0
        self._lock = threading.Lock()

    def value(self, S):
        v = self.inner.value(S)
        with self._lock:
            self.calls += 1
        if v < -TOL or math.isnan(v):
            raise NegativeValueError(f"oracle returned {v!r} for {sorted(S)}")
        return v

    def marginal(self, a, S):
        S = set(S)
        return self.value(S | {a}) - self.value(S)


def counted(oracle: SubmodularOracle) -> CountingOracle:
    return oracle if isinstance(oracle, CountingOracle) else CountingOracle(oracle)


@dataclass
class SolutionState:
    """Current set with its global-ordering weights, aggregate cost and value.

    ``S`` is kept sorted. ``w[a]`` for ``a`` in ``S`` is
    ``f(S ∩ [a]) - f(S ∩ [a-1])``; ``fval`` is ``f(S)``.
    """

    S: list[int] = field(default_factory=list)
    w: dict[int, float] = field(default_factory=dict)
    gamma: float = 0.0
    fval: float = 0.0

    def __contains__(self, a: int) -> bool:
        return a in self.w

    def __len__(self) -> int:
        return len(self.S)


def rebuild_weights(
    state: SolutionState,
    oracle: SubmodularOracle,
    gamma: Sequence[float] | np.ndarray | None = None,
) -> SolutionState:
    """Recompute every weight by evaluating the prefixes of ``S`` in order.

    Issues exactly ``|S| + 1`` value queries. ``gamma`` is the per-element
    aggregate knapsack cost; when given, ``state.gamma`` is refreshed too.
    """
    S = sorted(state.S)
    prev = oracle.value(())
    w = {}
    prefix: list[int] = []
    for a in S:
        prefix.append(a)
        cur = oracle.value(prefix)
        w[a] = cur - prev
        prev = cur
    state.S = S
    state.w = w
    state.fval = prev
    if gamma is not None:
        state.gamma = math.fsum(gamma[a] for a in S)
    return state


def marginal_gain(b: int, state: SolutionState, oracle: SubmodularOracle) -> float:
    """``f(S + b) - f(S)`` using the cached ``f(S)``: one value query."""
    if b in state.w:
        raise ValueError(f"element {b} is already in the solution")
    return oracle.value(state.S + [b]) - state.fval


@dataclass
class RunReport:
    """Outcome of one algorithm run."""

    algorithm: str
    set: tuple[int, ...]
    objective: float
    feasible: bool
    oracle_calls: int
    wall_ms: float
    params: dict = field(default_factory=dict)
