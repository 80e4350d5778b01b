"""Comparison algorithms: plain greedy, density greedy and density-thresholded greedy."""

from __future__ import annotations

import math
import time

import numpy as np

from .barrier import _report
from .constraints import cardinality_upper_bound
from .core import TOL, CountingOracle, RunReport
from .instance import ProblemInstance


def _addable(instance, S, load, b):
    new = load + instance.knapsacks.costs[:, b]
    return bool(np.all(new <= 1 + TOL)) and instance.matchoid.can_add(S, b), new


def _greedy_by(instance, counter, key):
    S: list[int] = []
    load = np.zeros(instance.knapsacks.ell)
    fS = counter.value(())
    while True:
        best = None
        for b in instance.elements:
            if b in S:
                continue
            ok, new = _addable(instance, S, load, b)
            if not ok:
                continue
            v = counter.value(S + [b])
            rank = key(b, v - fS)
            if best is None or rank > best[0]:
                best = (rank, b, v, new)
        if best is None:
            return S, fS
        _, b, fS, load = best
        S.append(b)


def greedy(instance: ProblemInstance) -> RunReport:
    """Add the feasible element with the largest marginal gain until none fits."""
    t0 = time.perf_counter()
    counter = CountingOracle(instance.objective)
    S, v = _greedy_by(instance, counter, lambda b, gain: (gain, -b))
    return _report("greedy", instance, counter, t0, S, v, {})


def density_greedy(instance: ProblemInstance) -> RunReport:
    """Greedy on gain per unit of aggregate knapsack cost.

    Zero-cost elements rank above every finite ratio, then by raw gain.
    """
    t0 = time.perf_counter()
    counter = CountingOracle(instance.objective)
    gamma = instance.knapsacks.gamma

    def key(b, gain):
        if gamma[b] <= 0:
            return (1, gain, -b)
        return (0, gain / gamma[b], -b)

    S, v = _greedy_by(instance, counter, key)
    return _report("density_greedy", instance, counter, t0, S, v, {})


def fast_threshold(instance: ProblemInstance, epsilon: float = 0.2) -> RunReport:
    """Greedy with a decreasing gain threshold and a fixed density floor.

    Density floors ``rho`` sweep geometrically over the range that can hold
    ``2 OPT / (p + 2 ell + 1)``. For each floor the gain threshold ``tau``
    falls from the largest admissible singleton by factors of ``1 + epsilon``
    down to ``epsilon / n`` of it; an element enters when its gain clears
    ``tau``, its density clears ``rho`` and the matchoid allows it. The first
    element that would overflow a knapsack ends the floor, leaving the current
    set and that element alone as candidates.
    """
    t0 = time.perf_counter()
    counter = CountingOracle(instance.objective)
    E = instance.elements
    n = max(len(E), 1)
    gamma = instance.knapsacks.gamma
    p = max(instance.matchoid.k, 1)
    ell = instance.knapsacks.ell
    f0 = counter.value(())
    singles = {a: counter.value([a]) - f0 for a in E}
    best: tuple = ((), f0)
    M = max(singles.values(), default=0.0)
    if M <= TOL:
        return _report("fast_threshold", instance, counter, t0, (), f0, {"epsilon": epsilon})

    r = cardinality_upper_bound(instance.matchoid, instance.knapsacks, E)
    scale = 2.0 / (p + 2 * ell + 1)
    rhos = []
    rho = scale * M / (1 + epsilon)
    while rho <= scale * r * M * (1 + 1e-12):
        rhos.append(rho)
        rho *= 1 + epsilon

    def dense_enough(b, gain, rho):
        return gamma[b] <= 0 or gain >= rho * gamma[b]

    for rho in rhos:
        admissible = [a for a in E if dense_enough(a, singles[a], rho)]
        if not admissible:
            continue
        top = max(singles[a] for a in admissible)
        tau = top
        S: list[int] = []
        load = np.zeros(ell)
        fS = f0
        overflow = None
        while tau >= (epsilon / n) * top and overflow is None:
            for b in E:
                if b in S or not instance.matchoid.can_add(S, b):
                    continue
                v = counter.value(S + [b])
                gain = v - fS
                if gain < tau or not dense_enough(b, gain, rho):
                    continue
                new = load + instance.knapsacks.costs[:, b]
                if np.any(new > 1 + TOL):
                    overflow = b
                    break
                S.append(b)
                load = new
                fS = v
            tau /= 1 + epsilon
        if fS > best[1]:
            best = (tuple(S), fS)
        if overflow is not None and singles[overflow] + f0 > best[1]:
            best = ((overflow,), singles[overflow] + f0)
    return _report("fast_threshold", instance, counter, t0, best[0], best[1],
                   {"epsilon": epsilon, "floors": len(rhos)})
