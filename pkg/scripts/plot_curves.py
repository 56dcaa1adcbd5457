"""Plot the averaged fitness curves written by ``tdneat experiment``.

    python scripts/plot_curves.py runs/full/curves.csv curves.png
"""
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def main(src, dst):
    series = {}
    with open(src, newline="") as fh:
        for row in csv.DictReader(fh):
            s = series.setdefault(row["algorithm"], ([], [], []))
            s[0].append(int(row["generation"]))
            s[1].append(float(row["mean_population_fitness"]))
            s[2].append(float(row["mean_best_fitness"]))
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(8, 7), sharex=True)
    for algo, (gen, mean, best) in series.items():
        top.plot(gen, mean, label=algo)
        bottom.plot(gen, best, label=algo)
    top.set_ylabel("mean population fitness")
    top.set_yscale("symlog")
    bottom.set_ylabel("mean best fitness")
    bottom.set_xlabel("generation")
    bottom.legend()
    fig.tight_layout()
    fig.savefig(dst, dpi=120)


if __name__ == "__main__":
    main(*sys.argv[1:3])
