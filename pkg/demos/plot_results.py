"""Plot scenario CSV outputs as PNG figures.

Usage:
    python demos/plot_results.py RESULTS_DIR [--out FIGURE_DIR]

RESULTS_DIR is the output root passed to `resilience-lab run` (one
subdirectory per scenario). Every recognized CSV becomes one PNG. This
script only reads the CSVs; all numbers come from the scenario runs.
"""

import argparse
import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

LADDER_FILES = {
    "fig2_longtime": "bound_ladder.csv",
    "fig7_hubbard_longtime": "hubbard_ladder.csv",
    "supp_qimf2d": "qimf2d_ladder.csv",
    "supp_twoqubit": "twoqubit_ladder.csv",
}
LADDER_KEYS = ["exact_error", "integral_bound", "split_bound",
               "entanglement_bound", "frobenius_bound", "spectral_bound"]


def read_csv(path):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if not r[0].startswith("#")]
    return {name: [row[i] for row in rows[1:]] for i, name in enumerate(rows[0])}


def column(cols, name):
    return np.array([float(v) for v in cols[name]])


def plot_ladder(path, out_png):
    cols = read_csv(path)
    t = column(cols, "time")
    prefixes = sorted({name.rsplit("exact_error", 1)[0]
                       for name in cols if name.endswith("exact_error")})
    fig, axes = plt.subplots(1, len(prefixes), figsize=(5 * len(prefixes), 4),
                             squeeze=False, sharey=True)
    for ax, prefix in zip(axes[0], prefixes):
        for key in LADDER_KEYS:
            ax.plot(t, column(cols, prefix + key), label=key)
        ax.set_title(prefix.rstrip("_") or "state")
        ax.set_xlabel("time")
        ax.set_yscale("log")
    axes[0][0].set_ylabel("error / bound")
    axes[0][-1].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_png, dpi=150)
    plt.close(fig)


def plot_segment(path, out_png):
    cols = read_csv(path)
    t = column(cols, "time")
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
    for name in cols:
        if name.endswith("segment_error") or name == "segment_error":
            ax1.plot(t, column(cols, name), label=name)
        if "entropy" in name:
            ax2.plot(t, column(cols, name), label=name, alpha=0.7)
    ax1.set_ylabel("one-segment error")
    ax1.legend(fontsize=8)
    ax2.set_ylabel("entropy (bits)")
    ax2.set_xlabel("time")
    ax2.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(out_png, dpi=150)
    plt.close(fig)


def plot_control(path, out_png):
    cols = read_csv(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    pulses = sorted(set(cols["pulse"]))
    for pulse in pulses:
        mask = [p == pulse for p in cols["pulse"]]
        ent = column(cols, "entropy_bits")[mask]
        err = column(cols, "error")[mask]
        ax.plot(ent, err, "o-", label=pulse, markersize=3)
    ax.set_xlabel("initial-state entropy (bits)")
    ax.set_ylabel("gate error")
    ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_png, dpi=150)
    plt.close(fig)


def plot_disorder(path, out_png):
    cols = read_csv(path)
    t = column(cols, "time")
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
    for ax, label in zip(axes, ("typical", "atypical")):
        ax.errorbar(t, column(cols, f"{label}_disorder_distance"),
                    yerr=column(cols, f"{label}_disorder_stderr"),
                    label="ensemble distance", fmt="o", markersize=3)
        ax.plot(t, column(cols, f"{label}_disorder_bound"), label="bound")
        ax.plot(t, column(cols, f"{label}_imperfection_distance"),
                label="static imperfection")
        ax.set_title(label)
        ax.set_xlabel("time")
        ax.legend(fontsize=8)
    axes[0].set_ylabel("trace distance")
    fig.tight_layout()
    fig.savefig(out_png, dpi=150)
    plt.close(fig)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("results", type=Path)
    parser.add_argument("--out", type=Path, default=Path("figures"))
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    made = []
    for scenario, fname in LADDER_FILES.items():
        path = args.results / scenario / fname
        if path.exists():
            plot_ladder(path, args.out / f"{scenario}.png")
            made.append(scenario)
    for scenario, fname, fn in [
        ("fig2_segment", "segment_error.csv", plot_segment),
        ("fig3_hubbard_segment", "hubbard_segment.csv", plot_segment),
        ("fig5_control_sweep", "control_sweep.csv", plot_control),
        ("fig6_disorder_vs_imperfection", "disorder_vs_imperfection.csv",
         plot_disorder),
    ]:
        path = args.results / scenario / fname
        if path.exists():
            fn(path, args.out / f"{scenario}.png")
            made.append(scenario)
    if not made:
        parser.error(f"no recognized CSV files under {args.results}")
    print(f"wrote {len(made)} figures to {args.out}/")


if __name__ == "__main__":
    main()
