"""Independent reference computations used as test oracles."""

import itertools
import math

import numpy as np

# criterion number -> (name, passed, detail); filled by the acceptance tests
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def record(num, name, ok, detail):
    ACCEPTANCE[num] = (name, bool(ok), detail)
    print(f"criterion {num} {'PASS' if ok else 'FAIL'}: {name}: {detail}")
    return ok


def coverage_value(adj, S, weights=None):
    covered = set(S)
    for u in S:
        covered |= set(adj[u])
    if weights is None:
        return float(len(covered))
    return float(sum(weights[v] for v in covered))


def cofactor_det(A):
    """Laplace expansion along the first row."""
    A = [list(r) for r in A]
    n = len(A)
    if n == 0:
        return 1.0
    if n == 1:
        return A[0][0]
    total = 0.0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in A[1:]]
        total += (-1) ** j * A[0][j] * cofactor_det(minor)
    return total


def logdet_reference(M, alpha, S):
    S = sorted(S)
    A = [[(1.0 if i == j else 0.0) + alpha * M[a][b] for j, b in enumerate(S)] for i, a in enumerate(S)]
    return math.log(cofactor_det(A))


def recursive_opt(instance):
    """Best feasible value by depth-first include/exclude recursion."""
    n = instance.n
    f = instance.objective
    best = [f.value(())]

    def go(i, S):
        if i == n:
            return
        T = S + [i]
        if instance.feasible(T):
            best[0] = max(best[0], f.value(T))
            go(i + 1, T)
        go(i + 1, S)

    go(0, [])
    return best[0]


def feasible_family(is_feasible, n):
    return {S for r in range(n + 1) for S in itertools.combinations(range(n), r) if is_feasible(S)}
