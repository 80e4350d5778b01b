"""Plot objective and oracle calls against the sweep value from a results CSV.

    python scripts/plot_results.py results/vertex_cover_budget.csv figure.png

Each point is the mean over seeds; failed rows are skipped.
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv")
    ap.add_argument("output")
    args = ap.parse_args()

    df = pd.read_csv(args.csv).dropna(subset=["objective"])
    var = df["sweep_var"].iloc[0]
    agg = df.groupby(["algorithm", "sweep_value"])[["objective", "oracle_calls"]].mean().reset_index()
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for name, g in agg.groupby("algorithm"):
        axes[0].plot(g["sweep_value"], g["objective"], marker="o", label=name)
        axes[1].plot(g["sweep_value"], g["oracle_calls"], marker="o", label=name)
    axes[0].set_ylabel("objective")
    axes[1].set_ylabel("oracle calls")
    axes[1].set_yscale("log")
    for ax in axes:
        ax.set_xlabel(var)
    axes[0].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(args.output, dpi=120)


if __name__ == "__main__":
    main()
