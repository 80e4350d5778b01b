"""Monotone submodular objectives used in the experiments."""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .core import SubmodularOracle


class VertexCoverObjective(SubmodularOracle):
    """Weight of ``S`` together with every vertex ``S`` points to."""

    def __init__(self, adjacency: Sequence[Iterable[int]] | Mapping[int, Iterable[int]], weights=None, n=None):
        items = adjacency.items() if isinstance(adjacency, Mapping) else enumerate(adjacency)
        nbrs = {u: frozenset(nb) for u, nb in items}
        if n is None:
            top = max((max(nb, default=-1) for nb in nbrs.values()), default=-1)
            n = max(max(nbrs, default=-1), top) + 1
            if weights is not None:
                n = max(n, len(weights))
        adj = [nbrs.get(u, frozenset()) for u in range(n)]
        if any(v < 0 or v >= n for nb in adj for v in nb) or any(u >= n for u in nbrs):
            raise ValueError("adjacency refers to vertices outside 0..n-1")
        self.adjacency = adj
        self.n = n
        self.weights = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
        if self.weights.shape != (n,) or np.any(self.weights < 0):
            raise ValueError("vertex weights must be a non-negative vector of length n")

    def covered(self, S: Iterable[int]) -> set[int]:
        cov = set()
        for u in S:
            cov.add(u)
            cov |= self.adjacency[u]
        return cov

    def value(self, S):
        cov = self.covered(S)
        if not cov:
            return 0.0
        return float(self.weights[list(cov)].sum())

    def out_degree(self) -> np.ndarray:
        return np.array([len(nb) for nb in self.adjacency], dtype=int)


class FacilityLocationObjective(SubmodularOracle):
    """``(1/n) * sum_i max_{j in S} M[i, j]``, with the empty max taken as 0."""

    def __init__(self, M):
        M = np.asarray(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("similarity matrix must be square")
        if np.any(M < 0):
            raise ValueError("similarities must be non-negative")
        self.M = M
        self.n = M.shape[0]

    def value(self, S):
        idx = list(S)
        if not idx:
            return 0.0
        return float(self.M[:, idx].max(axis=1).mean())


class NotPSDError(ValueError):
    pass


class LogDetObjective(SubmodularOracle):
    """``log det(I + alpha * M_S)`` for a PSD similarity matrix ``M``."""

    def __init__(self, M, alpha: float = 1.0):
        M = np.asarray(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("similarity matrix must be square")
        if not np.allclose(M, M.T, atol=1e-10):
            raise ValueError("similarity matrix must be symmetric")
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        self.M = M
        self.alpha = float(alpha)
        self.n = M.shape[0]

    def value(self, S):
        idx = sorted(S)
        if not idx:
            return 0.0
        A = np.eye(len(idx)) + self.alpha * self.M[np.ix_(idx, idx)]
        try:
            L = np.linalg.cholesky(A)
        except np.linalg.LinAlgError:
            raise NotPSDError(f"I + alpha*M_S is not positive definite for S={idx}") from None
        return float(2.0 * np.log(np.diag(L)).sum())


class ConcaveOverModularObjective(SubmodularOracle):
    """``sum_w sqrt(sum_{e in S} score[w, e])``.

    ``score`` has one row per word and one column per element.
    """

    def __init__(self, score):
        score = np.asarray(score, dtype=float)
        if score.ndim != 2:
            raise ValueError("score must be a (words x elements) matrix")
        if np.any(score < 0):
            raise ValueError("scores must be non-negative")
        self.score = score
        self.n = score.shape[1]

    @classmethod
    def from_documents(cls, values: Sequence[float], words: Sequence[Iterable[str]]):
        """Each element ``e`` scores ``values[e]`` on every distinct word it carries."""
        if len(values) != len(words):
            raise ValueError("one value per document is required")
        vocab = sorted({w for ws in words for w in ws})
        index = {w: i for i, w in enumerate(vocab)}
        score = np.zeros((len(vocab), len(values)))
        for e, (val, ws) in enumerate(zip(values, words)):
            for w in set(ws):
                score[index[w], e] = val
        obj = cls(score)
        obj.vocabulary = vocab
        return obj

    def value(self, S):
        idx = list(S)
        if not idx:
            return 0.0
        return float(np.sqrt(self.score[:, idx].sum(axis=1)).sum())


def rbf_similarity(X, lam: float = 1.0) -> np.ndarray:
    """``exp(-lam * ||x_i - x_j||)`` for the rows of ``X``."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("features must be a 2-d array")
    return np.exp(-lam * cdist(X, X))
