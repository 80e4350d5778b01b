"""Run an experiment config and write its CSV.

    python scripts/run_sweep.py configs/vertex_cover_budget.cfg [--output out.csv]

Set BARRIERSUB_THREADS to run sweep cells in parallel.
"""

import argparse
import sys
from pathlib import Path

from barriersub.bench import load_config, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--output")
    args = ap.parse_args()
    cfg = load_config(args.config)
    out = Path(args.output or cfg.output or "results.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        rows = run_experiment(cfg, fh)
    failed = sum(r.failed for r in rows)
    print(f"wrote {len(rows)} rows to {out} ({failed} failed)")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
