"""Command line entry point: ``run``, ``solve``, ``verify`` and ``gen``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..verify import FAMILIES, MAX_BRUTE_N, brute_force_opt, random_instance
from .experiment import (
    ALGORITHMS,
    ConfigError,
    apply_sweep,
    build_instance,
    load_config,
    run_algorithm,
    run_experiment,
)
from .io import FormatError, instance_to_dict, save_instance

EXIT_OK, EXIT_ROW_FAILED, EXIT_CONFIG = 0, 1, 2


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="barriersub", description="Barrier-function local search benchmarks.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a configured sweep and write CSV rows")
    run.add_argument("--config", required=True, help="flat key=value config file")
    run.add_argument("--output", help="override the config's output path ('-' for stdout)")

    solve = sub.add_parser("solve", help="run one algorithm on one instance")
    solve.add_argument("--algo", default="barrier_greedy", choices=sorted(ALGORITHMS))
    solve.add_argument("--epsilon", type=float, default=0.2)
    solve.add_argument("--lambda", dest="lam", type=float, default=None)
    src = solve.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", help="edge list")
    src.add_argument("--features", help="feature CSV (facility location objective)")
    src.add_argument("--instance", help="instance JSON file")
    solve.add_argument("--knapsack", help="cost CSV, one row per element")
    solve.add_argument("--budget", type=_floats, help="comma-separated budgets")
    solve.add_argument("--matroid", help="e.g. uniform:m=15+partition:file=parts.csv,limits=6")
    solve.add_argument("--similarity-lambda", type=float, default=1.0, help="feature similarity scale")

    ver = sub.add_parser("verify", help="check every algorithm against brute force on random instances")
    ver.add_argument("--max-n", type=int, default=10)
    ver.add_argument("--count", type=int, default=20, help="instances per (k, ell) pair")
    ver.add_argument("--epsilon", type=float, default=0.1)

    gen = sub.add_parser("gen", help="write a random instance as JSON")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--n", type=int, default=8)
    gen.add_argument("--k", type=int, default=2)
    gen.add_argument("--ell", type=int, default=2)
    gen.add_argument("--family", default="coverage", choices=FAMILIES)
    gen.add_argument("--output", "-o", help="output path (default stdout)")
    return p


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    out = args.output or cfg.output
    if out in (None, "-"):
        rows = run_experiment(cfg, sys.stdout)
    else:
        with open(out, "w", newline="") as fh:
            rows = run_experiment(cfg, fh)
    return EXIT_ROW_FAILED if any(r.failed for r in rows) else EXIT_OK


def _cmd_solve(args) -> int:
    if args.instance:
        source = f"instance:path={Path(args.instance).resolve()}"
    elif args.graph:
        source = f"graph:path={Path(args.graph).resolve()}"
    else:
        source = f"features:path={Path(args.features).resolve()},lambda={args.similarity_lambda}"
    inst = build_instance(source, 0, args.matroid, args.knapsack, args.budget)
    if args.instance and args.budget:
        if len(args.budget) != 1:
            raise ConfigError("instance files take a single --budget scale")
        inst = apply_sweep(inst, "budget", args.budget[0])
    rep = run_algorithm(args.algo, inst, args.epsilon, args.lam)
    print(json.dumps({
        "algorithm": rep.algorithm,
        "set": list(rep.set),
        "objective": rep.objective,
        "feasible": rep.feasible,
        "oracle_calls": rep.oracle_calls,
        "wall_ms": rep.wall_ms,
        "params": {k: v for k, v in rep.params.items() if isinstance(v, (int, float, str, type(None)))},
    }))
    return EXIT_OK if rep.feasible else EXIT_ROW_FAILED


def _cmd_verify(args) -> int:
    if not 0 <= args.max_n <= MAX_BRUTE_N:
        raise ConfigError(f"--max-n must be in [0, {MAX_BRUTE_N}]")
    bounds = {
        "barrier_greedy": lambda k: 2 * (k + 1) + 10 * args.epsilon,
        "barrier_greedy_pp": lambda k: (k + 1) + 10 * args.epsilon,
    }
    failures = 0
    total = 0
    for k, ell in ((1, 1), (2, 1), (2, 2), (3, 2)):
        for s in range(args.count):
            n = min(args.max_n, 4 + s % 7)
            inst = random_instance(7000 + 100 * k + 10 * ell + s, n, k, ell, FAMILIES[s % len(FAMILIES)])
            opt = brute_force_opt(inst)
            for alg in ALGORITHMS:
                rep = run_algorithm(alg, inst, args.epsilon)
                total += 1
                ok = rep.feasible and rep.objective <= opt.opt_value + 1e-9
                if alg in bounds:
                    ok = ok and rep.objective >= opt.opt_value / bounds[alg](k) - 1e-9
                if not ok:
                    failures += 1
                    print(f"FAIL {alg} {inst.name}: {rep.objective} vs opt {opt.opt_value}")
    print(f"verify: {total - failures}/{total} runs passed")
    return EXIT_OK if failures == 0 else EXIT_ROW_FAILED


def _cmd_gen(args) -> int:
    inst = random_instance(args.seed, args.n, args.k, args.ell, args.family)
    if args.output:
        save_instance(inst, args.output)
    else:
        print(json.dumps(instance_to_dict(inst), indent=1))
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    handler = {"run": _cmd_run, "solve": _cmd_solve, "verify": _cmd_verify, "gen": _cmd_gen}[args.command]
    try:
        return handler(args)
    except (ConfigError, FormatError, OSError, ValueError) as e:
        print(f"barriersub: error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
