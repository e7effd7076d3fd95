#!/usr/bin/env python3
"""Quick-look plots of emitted CSVs (optional; needs matplotlib).

Usage: python scripts/plot_results.py results/parallel_n8/trajectory.csv
Produces <stem>.png next to the input file.  Plotting is a convenience on
top of the CSV outputs and is not part of the tested surface.
"""

import csv
import sys
from pathlib import Path

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit("matplotlib is not installed; the CSVs are plot-ready as-is")


def load(path):
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        rows = [[float(c) if c else float("nan") for c in row] for row in reader]
    cols = list(zip(*rows))
    return {name: cols[i] for i, name in enumerate(header)}


def main() -> int:
    if len(sys.argv) != 2:
        print(__doc__)
        return 2
    path = Path(sys.argv[1])
    data = load(path)
    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    t = data["t"]
    panels = [
        ("E", "stored energy"),
        ("P", "power"),
        ("var_HB", "battery variance"),
        ("I_E", "energy-space Fisher information"),
    ]
    for ax, (col, label) in zip(axes.flat, panels):
        ax.plot(t, data[col], lw=0.8)
        ax.set_ylabel(label)
    for ax in axes[-1]:
        ax.set_xlabel("t")
    fig.tight_layout()
    target = path.with_suffix(".png")
    fig.savefig(target, dpi=150)
    print(f"wrote {target}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
