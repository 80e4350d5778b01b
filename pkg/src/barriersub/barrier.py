"""Local search on the barrier potential.

For a guess ``omega`` of the optimum the potential of a set is

    phi(S) = (omega - (k+1) f(S)) / (1 - gamma(S))

and the energy of an element is

    delta_a = (k+1) (lam - gamma(S)) w_a - (omega - (k+1) f(S)) gamma_a

with ``lam = 1`` for the provable algorithms. Elements with non-positive
energy are dropped; a swap brings in the ``b`` maximizing
``delta_b - sum(delta_a for a in U_b)`` where ``U_b`` are the cheapest
exchanges that keep the matchoid feasible.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .constraints import (
    ContractedMatroid,
    KnapsackSet,
    MatchoidConstraint,
    cardinality_upper_bound,
    exchange_candidate,
    pad_constraints,
)
from .core import TOL, CountingOracle, RunReport, SolutionState, SubmodularOracle, rebuild_weights
from .instance import ProblemInstance


@dataclass(frozen=True)
class GuessGrid:
    """Powers of ``1 + epsilon`` in ``[M / (1 + epsilon), r * M]``."""

    epsilon: float
    M: float
    r: int
    values: tuple[float, ...]

    @classmethod
    def build(cls, M: float, r: int, epsilon: float) -> "GuessGrid":
        if not 0 < epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if M <= 0 or r < 1:
            return cls(epsilon, M, r, ())
        base = 1.0 + epsilon
        lo, hi = M / base, r * M
        i = math.floor(math.log(lo) / math.log(base))
        while base**i < lo * (1 - 1e-12):
            i += 1
        vals = []
        while base**i <= hi * (1 + 1e-12):
            vals.append(base**i)
            i += 1
        return cls(epsilon, M, r, tuple(vals))

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


@dataclass(frozen=True)
class DeltaParams:
    k: int
    omega: float
    lam: float = 1.0

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if not 1 - TOL <= self.lam <= max(self.k, 1) + TOL:
            raise ValueError(f"lambda must lie in [1, k={self.k}], got {self.lam}")


def potential(state: SolutionState, p: DeltaParams) -> float:
    if state.gamma >= 1:
        raise ValueError(f"potential undefined for gamma(S)={state.gamma} >= 1")
    return (p.omega - (p.k + 1) * state.fval) / (1 - state.gamma)


def delta(
    a: int,
    state: SolutionState,
    p: DeltaParams,
    gamma,
    oracle: SubmodularOracle | None = None,
    w_a: float | None = None,
) -> float:
    """Energy of ``a`` relative to ``state``.

    Members of ``S`` use their stored weight; outsiders use ``w_a`` when
    given, otherwise their marginal gain from ``oracle``.
    """
    if w_a is None:
        if a in state:
            w_a = state.w[a]
        else:
            if oracle is None:
                raise ValueError("an oracle is needed for the marginal gain of an outside element")
            w_a = oracle.value(state.S + [a]) - state.fval
    return (p.k + 1) * (p.lam - state.gamma) * w_a - (p.omega - (p.k + 1) * state.fval) * gamma[a]


# -- instrumentation ---------------------------------------------------------


@dataclass
class Step:
    kind: str  # "swap" or "cleanup"
    added: int | None
    removed: tuple[int, ...]
    f_before: float
    f_after: float | None
    gamma_before: float
    gamma_after: float
    phi_before: float | None
    phi_after: float | None
    score: float | None = None
    min_delta_in_S: float | None = None


@dataclass
class GuessRun:
    omega: float
    k: int
    cap: int
    lam: float = 1.0
    iterations: int = 0
    exit: str = ""
    result: tuple[int, ...] = ()
    value: float = 0.0
    steps: list[Step] = field(default_factory=list)


# -- the local search --------------------------------------------------------


class _Search:
    """Shared state of one algorithm run on one (already padded) instance."""

    def __init__(self, instance: ProblemInstance, oracle: SubmodularOracle):
        self.instance = instance
        self.oracle = oracle
        self.matchoid, self.knapsacks, self.k = pad_constraints(
            instance.matchoid, instance.knapsacks, instance.n
        )
        self.gamma = self.knapsacks.gamma
        self.elements = instance.elements
        self.f_empty = oracle.value(())

    def _phi(self, state, omega):
        if state.gamma >= 1 - TOL:
            return None
        return (omega - (self.k + 1) * state.fval) / (1 - state.gamma)

    def _deltas(self, state, omega, lam):
        cw = (self.k + 1) * (lam - state.gamma)
        cg = omega - (self.k + 1) * state.fval
        return cw, cg, {a: cw * state.w[a] - cg * self.gamma[a] for a in state.S}

    def _rebuild(self, S):
        st = SolutionState(S=sorted(S))
        return rebuild_weights(st, self.oracle, self.gamma)

    def _best_swap(self, state, omega, lam, knapsack_filter):
        cw, cg, dS = self._deltas(state, omega, lam)
        inside = set(state.S)
        outside = [b for b in self.elements if b not in inside]
        if not outside:
            return None, dS
        base = state.S
        fS = state.fval
        best = None
        for b in outside:
            U = exchange_candidate(base, b, self.matchoid, dS)
            if U is None:
                continue
            if knapsack_filter:
                T = [a for a in base if a not in U] + [b]
                if not self.instance.knapsacks.feasible(T):
                    continue
            wb = self.oracle.value(base + [b]) - fS
            score = cw * wb - cg * self.gamma[b] - sum(dS[a] for a in U)
            if best is None or score > best[0]:
                best = (score, b, U)
        return best, dS

    def _cleanup(self, state, omega, lam, run):
        while state.S:
            _, _, dS = self._deltas(state, omega, lam)
            worst = min(state.S, key=lambda a: (dS[a], a))
            if dS[worst] > TOL:
                break
            before = state
            state = self._rebuild([a for a in state.S if a != worst])
            if run is not None:
                run.steps.append(
                    Step(
                        "cleanup", None, (worst,), before.fval, state.fval, before.gamma, state.gamma,
                        self._phi(before, omega), self._phi(state, omega),
                    )
                )
        return state

    def guess_run(self, omega, epsilon, cap, run=None):
        """One pass of the provable local search for a fixed guess."""
        k = self.k
        target = (1 - epsilon) * omega / (k + 1)
        state = SolutionState(fval=self.f_empty)
        it = 0
        exit_reason = "cap"
        pending = None
        while True:
            if state.fval >= target:
                exit_reason = "threshold"
                break
            if it >= cap:
                exit_reason = "cap"
                break
            best, dS = self._best_swap(state, omega, 1.0, knapsack_filter=False)
            if best is None or best[0] <= TOL:
                exit_reason = "stalled"
                break
            score, b, U = best
            T = sorted([a for a in state.S if a not in U] + [b])
            it += 1
            g_new = self.knapsacks.aggregate(T)
            if g_new >= 1 - TOL:
                pending = (T, b)
                exit_reason = "gamma"
                if run is not None:
                    run.steps.append(
                        Step("swap", b, tuple(sorted(U)), state.fval, None, state.gamma, g_new,
                             self._phi(state, omega), None, score, min(dS.values(), default=None))
                    )
                break
            before = state
            state = self._rebuild(T)
            if run is not None:
                run.steps.append(
                    Step("swap", b, tuple(sorted(U)), before.fval, state.fval, before.gamma, state.gamma,
                         self._phi(before, omega), self._phi(state, omega), score,
                         min(dS.values(), default=None))
                )
            state = self._cleanup(state, omega, 1.0, run)

        if pending is None:
            result, value = tuple(state.S), state.fval
        else:
            T, b = pending
            if self.instance.knapsacks.feasible(T):
                result, value = tuple(T), self.oracle.value(T)
            else:
                rest = [a for a in T if a != b]
                v_rest = self.oracle.value(rest)
                v_b = self.oracle.value([b])
                if v_b > v_rest:
                    result, value = (b,), v_b
                else:
                    result, value = tuple(rest), v_rest
        if run is not None:
            run.iterations, run.exit, run.result, run.value = it, exit_reason, result, value
        return result, value

    def heuristic_run(self, omega, lam, cap, run=None):
        """Local search with the relaxed energy; swaps must respect every knapsack."""
        state = SolutionState(fval=self.f_empty)
        it = 0
        exit_reason = "cap"
        while it < cap:
            best, dS = self._best_swap(state, omega, lam, knapsack_filter=True)
            if best is None:
                exit_reason = "no-candidate"
                break
            score, b, U = best
            it += 1
            before = state
            state = self._rebuild([a for a in state.S if a not in U] + [b])
            if run is not None:
                run.steps.append(
                    Step("swap", b, tuple(sorted(U)), before.fval, state.fval, before.gamma, state.gamma,
                         self._phi(before, omega), self._phi(state, omega), score,
                         min(dS.values(), default=None))
                )
            state = self._cleanup(state, omega, lam, run)
        if run is not None:
            run.iterations, run.exit, run.result, run.value = it, exit_reason, tuple(state.S), state.fval
        return tuple(state.S), state.fval

    def schedule(self, epsilon):
        """Largest singleton value, cardinality bound, guess grid and iteration cap."""
        singles = {a: self.oracle.value([a]) for a in self.elements}
        M = max(singles.values(), default=0.0)
        r = cardinality_upper_bound(self.instance.matchoid, self.instance.knapsacks, self.elements)
        grid = GuessGrid.build(M, r, epsilon)
        cap = math.ceil(r * math.log(1 / epsilon))
        return singles, r, grid, cap


def _barrier_greedy(instance, oracle, epsilon, trace=None):
    """Returns (set, value, chosen omega, info dict)."""
    search = _Search(instance, oracle)
    if not instance.elements:
        return (), search.f_empty, None, {"k": search.k, "r": 0, "guesses": 0}
    singles, r, grid, cap = search.schedule(epsilon)
    best = ((), search.f_empty, None)
    for omega in grid:
        run = GuessRun(omega, search.k, cap) if trace is not None else None
        S, v = search.guess_run(omega, epsilon, cap, run)
        if run is not None:
            trace.append(run)
        if v > best[1]:
            best = (S, v, omega)
    if not grid.values:
        # every singleton is worth f(empty): nothing to search over
        a = max(singles, key=lambda x: (singles[x], -x))
        if singles[a] > best[1]:
            best = ((a,), singles[a], None)
    return best[0], best[1], best[2], {"k": search.k, "r": r, "guesses": len(grid), "cap": cap}


def _report(name, instance, counter, t0, S, value, params):
    S = tuple(sorted(S))
    return RunReport(
        algorithm=name,
        set=S,
        objective=float(value),
        feasible=instance.feasible(S),
        oracle_calls=counter.calls,
        wall_ms=(time.perf_counter() - t0) * 1e3,
        params=params,
    )


def barrier_greedy(instance: ProblemInstance, epsilon: float = 0.2, *, trace: list | None = None) -> RunReport:
    """Barrier local search over a geometric grid of optimum guesses.

    Pass a list as ``trace`` to collect one :class:`GuessRun` per guess.
    """
    t0 = time.perf_counter()
    counter = CountingOracle(instance.objective)
    S, v, omega, info = _barrier_greedy(instance, counter, epsilon, trace)
    return _report("barrier_greedy", instance, counter, t0, S, v, {"epsilon": epsilon, "omega": omega, **info})


class ReducedObjective(SubmodularOracle):
    """``g(S) = f(S ∪ P) - f(P)``."""

    def __init__(self, f: SubmodularOracle, P, fP: float):
        self.f = f
        self.P = tuple(P)
        self.fP = fP
        self.n = f.n

    def value(self, S):
        S = list(S)
        if not S:
            return 0.0
        return self.f.value(S + [a for a in self.P if a not in S]) - self.fP


def reduce_instance(instance: ProblemInstance, oracle: SubmodularOracle, pair, f_pair: float) -> ProblemInstance:
    """Condition the instance on ``pair`` being in the solution.

    Capacities shrink by the pair's costs, matroids are contracted by the pair,
    and elements whose conditional singleton gain exceeds half of ``f(pair)``
    are removed.
    """
    g = ReducedObjective(oracle, pair, f_pair)
    P = set(pair)
    ks = instance.knapsacks
    residual = 1.0 - ks.load(pair)
    costs = np.array(ks.costs, copy=True)
    for i in range(ks.ell):
        if residual[i] > TOL:
            costs[i] /= residual[i]
        else:
            costs[i] = np.where(costs[i] > TOL, 2.0, 0.0)
    matchoid = MatchoidConstraint([ContractedMatroid(M, P) for M in instance.matchoid.matroids])
    ground = []
    for a in instance.elements:
        if a in P:
            continue
        if g.value([a]) > 0.5 * f_pair:
            continue
        ground.append(a)
    return ProblemInstance(g, matchoid, KnapsackSet(costs), ground=tuple(ground))


def barrier_greedy_pp(instance: ProblemInstance, epsilon: float = 0.2) -> RunReport:
    """Barrier-greedy on every instance conditioned on a feasible pair."""
    t0 = time.perf_counter()
    counter = CountingOracle(instance.objective)
    E = instance.elements
    f0 = counter.value(())
    singles = {a: counter.value([a]) for a in E}
    best: tuple = ((), f0)
    for a in E:
        if singles[a] > best[1]:
            best = ((a,), singles[a])
    runs = 0
    for pair in itertools.combinations(E, 2):
        if not instance.feasible(pair):
            continue
        runs += 1
        f_pair = counter.value(pair)
        reduced = reduce_instance(instance, counter, pair, f_pair)
        S, g, _, _ = _barrier_greedy(reduced, reduced.objective, epsilon)
        val = f_pair + g
        if val > best[1]:
            best = (tuple(S) + pair, val)
    return _report("barrier_greedy_pp", instance, counter, t0, best[0], best[1],
                   {"epsilon": epsilon, "pairs": runs})


def barrier_heuristic(
    instance: ProblemInstance,
    epsilon: float = 0.2,
    lam: float | None = None,
    *,
    trace: list | None = None,
) -> RunReport:
    """Relaxed-energy local search that may fill several knapsacks at once.

    ``lam`` defaults to the number of knapsacks (at least 1).
    """
    t0 = time.perf_counter()
    counter = CountingOracle(instance.objective)
    search = _Search(instance, counter)
    if lam is None:
        lam = float(max(instance.knapsacks.ell, 1))
    DeltaParams(search.k, 1.0, lam)  # validates the range of lam
    best = ((), search.f_empty, None)
    info = {"epsilon": epsilon, "lambda": lam, "omega": None, "k": search.k}
    if instance.elements:
        singles, r, grid, cap = search.schedule(epsilon)
        info.update(r=r, guesses=len(grid), cap=cap)
        for omega in grid:
            run = GuessRun(omega, search.k, cap, lam) if trace is not None else None
            S, v = search.heuristic_run(omega, lam, cap, run)
            if run is not None:
                trace.append(run)
            if v > best[1]:
                best = (S, v, omega)
        info["omega"] = best[2]
    return _report("barrier_heuristic", instance, counter, t0, best[0], best[1], info)
