"""File formats: edge lists, feature CSVs, partitions, knapsack costs, instances and result rows."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..constraints import (
    ContractedMatroid,
    FreeMatroid,
    KnapsackSet,
    MatchoidConstraint,
    MatroidOracle,
    PartitionMatroid,
    UniformMatroid,
    normalize,
)
from ..core import ModularObjective
from ..instance import ProblemInstance
from ..objectives import (
    ConcaveOverModularObjective,
    FacilityLocationObjective,
    LogDetObjective,
    VertexCoverObjective,
    rbf_similarity,
)

INSTANCE_FORMAT = "barriersub-instance/1"


class FormatError(ValueError):
    pass


# -- graphs ------------------------------------------------------------------


@dataclass
class GraphData:
    objective: VertexCoverObjective
    costs: np.ndarray  # raw costs, mean equal to the configured target
    node_ids: list
    out_degree: np.ndarray


def degree_costs(out_degree, q: int = 6, mean_cost: float = 1 / 20) -> np.ndarray:
    """``c(u) ∝ 1 + max(0, d(u) - q)`` scaled to the requested mean."""
    d = np.asarray(out_degree, dtype=float)
    if d.size == 0:
        return d
    c = 1.0 + np.maximum(0.0, d - q)
    return c * (mean_cost / c.mean())


def _node_key(tok: str):
    try:
        return (0, int(tok), "")
    except ValueError:
        return (1, 0, tok)


def load_graph(path, q: int = 6, mean_cost: float = 1 / 20) -> GraphData:
    """Read a directed edge list (``u v`` per line, ``#`` comments).

    Node ids are remapped to ``0..n-1`` in sorted order (numeric ids first).
    """
    edges = []
    nodes = set()
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) < 2:
                raise FormatError(f"{path}:{lineno}: expected 'u v', got {line!r}")
            u, v = parts[0], parts[1]
            edges.append((u, v))
            nodes.update((u, v))
    ids = sorted(nodes, key=_node_key)
    index = {u: i for i, u in enumerate(ids)}
    adj = [set() for _ in ids]
    for u, v in edges:
        if u != v:
            adj[index[u]].add(index[v])
    objective = VertexCoverObjective(adj)
    deg = objective.out_degree()
    return GraphData(objective, degree_costs(deg, q, mean_cost), [_parse_id(u) for u in ids], deg)


def _parse_id(tok):
    k = _node_key(tok)
    return k[1] if k[0] == 0 else tok


# -- features and matrices -----------------------------------------------------


def read_matrix(path) -> np.ndarray:
    """Numeric CSV (comma or whitespace separated); ragged rows are rejected."""
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            toks = line.replace(",", " ").split()
            try:
                rows.append([float(t) for t in toks])
            except ValueError:
                raise FormatError(f"{path}:{lineno}: non-numeric value in {line!r}") from None
            if len(rows[-1]) != len(rows[0]):
                raise FormatError(f"{path}:{lineno}: expected {len(rows[0])} columns, got {len(rows[-1])}")
    if not rows:
        return np.zeros((0, 0))
    return np.array(rows)


def load_features(path, lam: float = 1.0) -> np.ndarray:
    """Similarity matrix ``exp(-lam * dist(x_i, x_j))`` for the feature rows in ``path``."""
    X = read_matrix(path)
    if X.size == 0:
        return np.zeros((0, 0))
    return rbf_similarity(X, lam)


def load_partition(path) -> dict[int, str]:
    """Block of each element.

    Lines are either ``element,block`` or just ``block`` (element = line order).
    """
    part = {}
    with open(path) as fh:
        idx = 0
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            toks = [t.strip() for t in line.replace(",", " ").split()]
            if len(toks) == 1:
                part[idx] = toks[0]
            elif len(toks) == 2:
                try:
                    part[int(toks[0])] = toks[1]
                except ValueError:
                    raise FormatError(f"{path}:{lineno}: element id must be an integer") from None
            else:
                raise FormatError(f"{path}:{lineno}: expected 'element,block' or 'block'")
            idx += 1
    return part


def load_knapsack(path, budgets=None) -> KnapsackSet:
    """Raw costs with one row per element and one column per knapsack."""
    C = read_matrix(path)
    if C.size == 0:
        raise FormatError(f"{path}: no cost rows")
    costs = C.T
    if budgets is None:
        budgets = [1.0] * costs.shape[0]
    if len(budgets) == 1 and costs.shape[0] > 1:
        budgets = list(budgets) * costs.shape[0]
    return normalize(costs, budgets)


# -- matroid spec mini-language --------------------------------------------------


def parse_matroid_spec(spec: str, n: int, base_dir: Path | str | None = None) -> list[MatroidOracle]:
    """Parse ``uniform:m=15+partition:file=parts.csv,limits=6``.

    ``limits`` is one integer for every block or ``block:limit`` pairs
    separated by ``;``.
    """
    base_dir = Path(base_dir or ".")
    out: list[MatroidOracle] = []
    for term in filter(None, (t.strip() for t in spec.split("+"))):
        kind, _, rest = term.partition(":")
        opts = _kv(rest)
        if kind == "uniform":
            if "m" not in opts:
                raise FormatError(f"uniform matroid needs m=: {term!r}")
            out.append(UniformMatroid(int(opts["m"]), range(n)))
        elif kind == "partition":
            if "file" not in opts or "limits" not in opts:
                raise FormatError(f"partition matroid needs file= and limits=: {term!r}")
            p = Path(opts["file"])
            part = load_partition(p if p.is_absolute() else base_dir / p)
            lim = opts["limits"]
            if ":" in lim:
                limits = {}
                for pair in lim.split(";"):
                    b, _, v = pair.partition(":")
                    limits[b.strip()] = int(v)
                out.append(PartitionMatroid(part, limits))
            else:
                out.append(PartitionMatroid(part, default_limit=int(lim)))
        elif kind == "free":
            out.append(FreeMatroid(range(n)))
        else:
            raise FormatError(f"unknown matroid kind {kind!r} in {spec!r}")
    return out


def _kv(text: str) -> dict[str, str]:
    out = {}
    for item in filter(None, (t.strip() for t in text.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise FormatError(f"expected key=value, got {item!r}")
        out[key.strip()] = val.strip()
    return out


# -- instance files --------------------------------------------------------------


def _objective_to_json(f):
    if isinstance(f, VertexCoverObjective):
        return {"type": "vertex_cover", "adjacency": [sorted(a) for a in f.adjacency], "weights": f.weights.tolist()}
    if isinstance(f, FacilityLocationObjective):
        return {"type": "facility_location", "M": f.M.tolist()}
    if isinstance(f, LogDetObjective):
        return {"type": "logdet", "M": f.M.tolist(), "alpha": f.alpha}
    if isinstance(f, ConcaveOverModularObjective):
        return {"type": "concave_modular", "score": f.score.tolist()}
    if isinstance(f, ModularObjective):
        return {"type": "modular", "values": f.values.tolist()}
    raise TypeError(f"cannot serialize objective of type {type(f).__name__}")


def _objective_from_json(d, n):
    kind = d.get("type")
    if kind == "vertex_cover":
        return VertexCoverObjective(d["adjacency"], d.get("weights"))
    if kind == "facility_location":
        return FacilityLocationObjective(np.array(d["M"], dtype=float).reshape(n, n))
    if kind == "logdet":
        return LogDetObjective(np.array(d["M"], dtype=float).reshape(n, n), d.get("alpha", 1.0))
    if kind == "concave_modular":
        return ConcaveOverModularObjective(np.array(d["score"], dtype=float).reshape(-1, n))
    if kind == "modular":
        return ModularObjective(d["values"])
    raise FormatError(f"unknown objective type {kind!r}")


def _matroid_to_json(M):
    if isinstance(M, UniformMatroid):
        return {"type": "uniform", "m": M.m, "ground": sorted(M.ground())}
    if isinstance(M, PartitionMatroid):
        blocks = sorted({b for b in M.part.values()}, key=str)
        return {
            "type": "partition",
            "part": [[a, M.part[a]] for a in sorted(M.part)],
            "limits": [[b, M.limit(b)] for b in blocks],
        }
    if isinstance(M, FreeMatroid):
        return {"type": "free", "ground": sorted(M.ground())}
    if isinstance(M, ContractedMatroid):
        raise TypeError("contracted matroids are internal and not serialized")
    raise TypeError(f"cannot serialize matroid of type {type(M).__name__}")


def _matroid_from_json(d):
    kind = d.get("type")
    if kind == "uniform":
        return UniformMatroid(d["m"], d["ground"])
    if kind == "partition":
        return PartitionMatroid({a: b for a, b in d["part"]}, {b: v for b, v in d["limits"]})
    if kind == "free":
        return FreeMatroid(d["ground"])
    raise FormatError(f"unknown matroid type {kind!r}")


def instance_to_dict(inst: ProblemInstance) -> dict:
    return {
        "format": INSTANCE_FORMAT,
        "name": inst.name,
        "n": inst.n,
        "k": inst.matchoid.k,
        "objective": _objective_to_json(inst.objective),
        "matroids": [_matroid_to_json(M) for M in inst.matchoid.matroids],
        "knapsacks": inst.knapsacks.costs.tolist(),
        "ground": list(inst.ground) if inst.ground is not None else None,
    }


def instance_from_dict(d: dict) -> ProblemInstance:
    if d.get("format") != INSTANCE_FORMAT:
        raise FormatError(f"not a {INSTANCE_FORMAT} document")
    n = int(d["n"])
    objective = _objective_from_json(d["objective"], n)
    matchoid = MatchoidConstraint([_matroid_from_json(m) for m in d["matroids"]], k=d.get("k"))
    costs = np.array(d["knapsacks"], dtype=float).reshape(-1, n)
    ground = tuple(d["ground"]) if d.get("ground") is not None else None
    return ProblemInstance(objective, matchoid, KnapsackSet(costs), ground=ground, name=d.get("name", ""))


def save_instance(inst: ProblemInstance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(inst), indent=1) + "\n")


def load_instance(path) -> ProblemInstance:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: {e}") from None
    return instance_from_dict(d)


# -- result rows -------------------------------------------------------------------

COLUMNS = ("algorithm", "sweep_var", "sweep_value", "seed", "objective", "feasible", "oracle_calls", "wall_ms", "set")


@dataclass(frozen=True)
class ResultRow:
    algorithm: str
    sweep_var: str
    sweep_value: float
    seed: int
    objective: float
    feasible: bool
    oracle_calls: int
    wall_ms: float
    set: tuple[int, ...]

    @property
    def failed(self) -> bool:
        return math.isnan(self.objective)

    def to_fields(self) -> list[str]:
        return [
            self.algorithm,
            self.sweep_var,
            repr(float(self.sweep_value)),
            str(self.seed),
            repr(float(self.objective)),
            "true" if self.feasible else "false",
            str(self.oracle_calls),
            repr(float(self.wall_ms)),
            ";".join(str(a) for a in sorted(self.set)),
        ]

    @classmethod
    def from_fields(cls, fields) -> "ResultRow":
        if len(fields) != len(COLUMNS):
            raise FormatError(f"expected {len(COLUMNS)} columns, got {len(fields)}")
        alg, var, val, seed, obj, feas, calls, ms, S = fields
        if feas not in ("true", "false"):
            raise FormatError(f"feasible must be true/false, got {feas!r}")
        return cls(
            alg, var, float(val), int(seed), float(obj), feas == "true", int(calls), float(ms),
            tuple(int(a) for a in S.split(";")) if S else (),
        )


def format_rows(rows, header: bool = True, with_wall: bool = True) -> str:
    """CSV text for ``rows``; ``with_wall=False`` blanks the timing column."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(COLUMNS)
    for r in rows:
        f = r.to_fields()
        if not with_wall:
            f[7] = ""
        w.writerow(f)
    return buf.getvalue()


def parse_rows(text: str) -> list[ResultRow]:
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        return []
    if tuple(rows[0]) != COLUMNS:
        raise FormatError(f"unexpected CSV header {rows[0]!r}")
    return [ResultRow.from_fields(r) for r in rows[1:] if r]
