"""Experiment configs, synthetic generators and the sweep runner."""

from __future__ import annotations

import hashlib
import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, TextIO

import numpy as np

from ..barrier import barrier_greedy, barrier_greedy_pp, barrier_heuristic
from ..baselines import density_greedy, fast_threshold, greedy
from ..constraints import (
    KnapsackSet,
    MatchoidConstraint,
    PartitionMatroid,
    UniformMatroid,
)
from ..core import RunReport
from ..instance import ProblemInstance
from ..objectives import FacilityLocationObjective, LogDetObjective, VertexCoverObjective
from ..verify import FAMILIES, SplitMix64, inst_a, random_instance
from .io import (
    ResultRow,
    degree_costs,
    format_rows,
    load_features,
    load_graph,
    load_instance,
    load_knapsack,
    parse_matroid_spec,
    _kv,
)

THREADS_ENV = "BARRIERSUB_THREADS"
SWEEP_VARS = ("budget", "matroid_limit", "cardinality", "none")


class ConfigError(ValueError):
    pass


ALGORITHMS: dict[str, Callable[..., RunReport]] = {
    "barrier_greedy": lambda inst, eps, lam: barrier_greedy(inst, eps),
    "barrier_greedy_pp": lambda inst, eps, lam: barrier_greedy_pp(inst, eps),
    "barrier_heuristic": lambda inst, eps, lam: barrier_heuristic(inst, eps, lam),
    "greedy": lambda inst, eps, lam: greedy(inst),
    "density_greedy": lambda inst, eps, lam: density_greedy(inst),
    "fast_threshold": lambda inst, eps, lam: fast_threshold(inst, eps),
}


def run_algorithm(name: str, instance: ProblemInstance, epsilon: float = 0.2, lam: float | None = None) -> RunReport:
    try:
        fn = ALGORITHMS[name]
    except KeyError:
        raise ConfigError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}") from None
    return fn(instance, epsilon, lam)


# -- synthetic vertex cover ------------------------------------------------------------


def synthetic_vertex_cover(
    seed: int,
    n: int = 200,
    communities: int = 5,
    m: int = 15,
    mi: int = 6,
    q: int = 6,
    mean_cost: float = 1 / 20,
    avg_degree: float = 6.0,
    budget: float = 1.0,
) -> ProblemInstance:
    """Community digraph with heavy-tailed out-degrees.

    Each node belongs to one of ``communities`` blocks (the partition matroid,
    limit ``mi`` per block) under a global cardinality cap ``m``. Out-edges
    stay inside the community with probability 0.8. One knapsack with the
    degree-based cost rule.
    """
    rng = SplitMix64(seed)
    block = [rng.randint(0, communities - 1) for _ in range(n)]
    members = [[u for u in range(n) if block[u] == c] for c in range(communities)]
    adj = []
    for u in range(n):
        # Pareto(1.5) tail scaled so the mean is about avg_degree
        d = int(avg_degree / 3 * (1.0 - rng.random()) ** (-1 / 1.5))
        d = max(1, min(d, n - 1))
        out = set()
        while len(out) < d:
            pool = members[block[u]] if rng.random() < 0.8 and len(members[block[u]]) > 1 else range(n)
            v = pool[rng.randint(0, len(pool) - 1)] if isinstance(pool, list) else rng.randint(0, n - 1)
            if v != u:
                out.add(v)
        adj.append(out)
    objective = VertexCoverObjective(adj)
    costs = degree_costs(objective.out_degree(), q, mean_cost) / budget
    matroids = [UniformMatroid(m, range(n)), PartitionMatroid(dict(enumerate(block)), default_limit=mi)]
    return ProblemInstance(
        objective, MatchoidConstraint(matroids), KnapsackSet(costs[None, :]),
        name=f"vertex-cover:seed={seed}:n={n}",
    )


# -- config ------------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    """One sweep: ``source`` built once per seed, each sweep value applied on top.

    ``source`` forms:

    * ``random:family=coverage,n=12,k=2,ell=1``
    * ``vertex_cover:n=200,communities=5,m=15,mi=6,q=6``
    * ``graph:path=edges.txt,q=6,mean=0.05`` (needs ``matroid``; optional ``knapsack``)
    * ``features:path=x.csv,lambda=1,objective=facility|logdet,alpha=1`` (needs ``matroid``)
    * ``instance:path=fixture.json`` or ``inst-a``
    """

    source: str
    algorithms: list[str]
    epsilon: float = 0.2
    lam: float | None = None
    sweep_var: str = "none"
    sweep_values: list[float] = field(default_factory=lambda: [1.0])
    seeds: list[int] = field(default_factory=lambda: [0])
    output: str | None = None
    matroid: str | None = None
    knapsack: str | None = None
    budgets: list[float] | None = None
    base_dir: str = "."

    def __post_init__(self):
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {a!r}; choose from {', '.join(ALGORITHMS)}")
        if self.sweep_var not in SWEEP_VARS:
            raise ConfigError(f"sweep must be one of {', '.join(SWEEP_VARS)}")
        if not self.sweep_values or any(not (v > 0) for v in self.sweep_values):
            raise ConfigError("sweep values must be positive")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if not (0 < self.epsilon < 1):
            raise ConfigError("epsilon must lie in (0, 1)")


def _list(text: str, conv) -> list:
    try:
        return [conv(t) for t in text.replace(",", " ").split()]
    except ValueError as e:
        raise ConfigError(str(e)) from None


def parse_config(text: str, base_dir: str | Path = ".") -> ExperimentConfig:
    """Flat ``key = value`` text; ``#`` starts a comment; lists are comma separated.

    Keys: source, algorithms, epsilon, lambda, sweep, values, seeds, output,
    matroid, knapsack, budget.
    """
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, val = line.partition("=")
        if not eq:
            raise ConfigError(f"line {lineno}: expected key = value")
        key = key.strip().lower()
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = val.strip()
    known = {"source", "algorithms", "epsilon", "lambda", "sweep", "values", "seeds", "output",
             "matroid", "knapsack", "budget"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "source" not in raw or "algorithms" not in raw:
        raise ConfigError("config needs 'source' and 'algorithms'")
    try:
        return ExperimentConfig(
            source=raw["source"],
            algorithms=_list(raw["algorithms"], str),
            epsilon=float(raw.get("epsilon", 0.2)),
            lam=float(raw["lambda"]) if "lambda" in raw else None,
            sweep_var=raw.get("sweep", "none"),
            sweep_values=_list(raw.get("values", "1"), float),
            seeds=_list(raw.get("seeds", "0"), int),
            output=raw.get("output"),
            matroid=raw.get("matroid"),
            knapsack=raw.get("knapsack"),
            budgets=_list(raw["budget"], float) if "budget" in raw else None,
            base_dir=str(base_dir),
        )
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(str(e)) from None


def load_config(path) -> ExperimentConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from None
    return parse_config(text, base_dir=p.parent)


# -- instance construction -------------------------------------------------------------


def _path(base_dir, p):
    p = Path(p)
    return p if p.is_absolute() else Path(base_dir) / p


def build_instance(
    source: str,
    seed: int = 0,
    matroid: str | None = None,
    knapsack: str | None = None,
    budgets: list[float] | None = None,
    base_dir: str | Path = ".",
) -> ProblemInstance:
    kind, _, rest = source.partition(":")
    kind = kind.strip()
    try:
        opts = _kv(rest)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    if kind == "inst-a":
        return inst_a()
    if kind == "random":
        family = opts.get("family", "coverage")
        if family not in FAMILIES:
            raise ConfigError(f"unknown family {family!r}")
        return random_instance(seed, int(opts.get("n", 10)), int(opts.get("k", 1)), int(opts.get("ell", 1)), family)
    if kind == "vertex_cover":
        return synthetic_vertex_cover(
            seed,
            n=int(opts.get("n", 200)),
            communities=int(opts.get("communities", 5)),
            m=int(opts.get("m", 15)),
            mi=int(opts.get("mi", 6)),
            q=int(opts.get("q", 6)),
            mean_cost=float(opts.get("mean", 1 / 20)),
        )
    if kind == "instance":
        if "path" not in opts:
            raise ConfigError("instance source needs path=")
        return load_instance(_path(base_dir, opts["path"]))
    if kind in ("graph", "features"):
        if "path" not in opts:
            raise ConfigError(f"{kind} source needs path=")
        if not matroid:
            raise ConfigError(f"{kind} source needs a matroid spec")
        path = _path(base_dir, opts["path"])
        if kind == "graph":
            g = load_graph(path, q=int(opts.get("q", 6)), mean_cost=float(opts.get("mean", 1 / 20)))
            objective = g.objective
            default_costs = g.costs[None, :]
        else:
            M = load_features(path, float(opts.get("lambda", 1.0)))
            which = opts.get("objective", "facility")
            if which == "facility":
                objective = FacilityLocationObjective(M)
            elif which == "logdet":
                objective = LogDetObjective(M, float(opts.get("alpha", 1.0)))
            else:
                raise ConfigError(f"features objective must be facility or logdet, got {which!r}")
            default_costs = np.zeros((0, objective.n))
        n = objective.n
        matroids = parse_matroid_spec(matroid, n, base_dir)
        if knapsack:
            knap = load_knapsack(_path(base_dir, knapsack), budgets)
        else:
            costs = default_costs
            if budgets and costs.shape[0]:
                costs = costs / np.asarray(budgets if len(budgets) == costs.shape[0] else budgets[:1])[:, None]
            knap = KnapsackSet(costs)
        if knap.n != n:
            raise ConfigError(f"knapsack file has {knap.n} rows, instance has {n} elements")
        return ProblemInstance(objective, MatchoidConstraint(matroids), knap, name=f"{kind}:{path.name}")
    raise ConfigError(f"unknown source kind {kind!r}")


def apply_sweep(instance: ProblemInstance, var: str, value: float) -> ProblemInstance:
    """Instance with the sweep variable set to ``value``.

    ``budget`` divides every normalized cost by ``value``; ``matroid_limit``
    sets every partition block limit; ``cardinality`` sets every uniform cap.
    """
    if var == "none":
        return instance
    if var == "budget":
        knap = KnapsackSet(instance.knapsacks.costs / float(value))
        return replace(instance, knapsacks=knap)
    if var in ("matroid_limit", "cardinality"):
        if value != int(value):
            raise ConfigError(f"{var} values must be integers")
        v = int(value)
        mats = []
        for M in instance.matchoid.matroids:
            if var == "matroid_limit" and isinstance(M, PartitionMatroid):
                M = PartitionMatroid(M.part, {}, default_limit=v)
            elif var == "cardinality" and isinstance(M, UniformMatroid):
                M = UniformMatroid(v, M.ground())
            mats.append(M)
        return replace(instance, matchoid=MatchoidConstraint(mats, k=instance.matchoid.k))
    raise ConfigError(f"unknown sweep variable {var!r}")


# -- runner ----------------------------------------------------------------------------------


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def _failed_row(alg, var, value, seed) -> ResultRow:
    return ResultRow(alg, var, float(value), seed, math.nan, False, 0, 0.0, ())


def _cell_rows(config: ExperimentConfig, value: float, seed: int) -> list[ResultRow]:
    var = config.sweep_var
    try:
        base = build_instance(config.source, seed, config.matroid, config.knapsack, config.budgets, config.base_dir)
        inst = apply_sweep(base, var, value)
    except Exception:
        return [_failed_row(a, var, value, seed) for a in config.algorithms]
    rows = []
    for alg in config.algorithms:
        try:
            rep = run_algorithm(alg, inst, config.epsilon, config.lam)
            rows.append(ResultRow(alg, var, float(value), seed, rep.objective, rep.feasible,
                                  rep.oracle_calls, rep.wall_ms, tuple(rep.set)))
        except Exception:
            rows.append(_failed_row(alg, var, value, seed))
    return rows


def run_experiment(config: ExperimentConfig, sink: TextIO | None = None, threads: int | None = None) -> list[ResultRow]:
    """Run every (sweep value, seed, algorithm) cell.

    Rows come out in sweep-value, seed, algorithm order. When ``sink`` is
    given the header and each row are written and flushed as soon as the
    row's cell (and all earlier cells) is done.
    """
    threads = threads or thread_count()
    cells = [(v, s) for v in config.sweep_values for s in config.seeds]
    lock = threading.Lock()
    out: list[ResultRow] = []
    if sink is not None:
        sink.write(format_rows([], header=True))
        sink.flush()

    def emit(rows):
        with lock:
            out.extend(rows)
            if sink is not None:
                sink.write(format_rows(rows, header=False))
                sink.flush()

    if threads == 1:
        for v, s in cells:
            emit(_cell_rows(config, v, s))
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            # map yields in submission order, so the sink stays ordered
            for rows in pool.map(lambda c: _cell_rows(config, *c), cells):
                emit(rows)
    return out


def run_to_file(config: ExperimentConfig, path=None) -> list[ResultRow]:
    path = path or config.output
    if path is None:
        raise ConfigError("no output path")
    with open(path, "w", newline="") as fh:
        return run_experiment(config, fh)


def determinism_digest(rows: Iterable[ResultRow]) -> str:
    """SHA-256 of the CSV with the timing column blanked."""
    return hashlib.sha256(format_rows(list(rows), with_wall=False).encode()).hexdigest()
