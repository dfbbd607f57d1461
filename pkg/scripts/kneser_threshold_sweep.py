"""Verdict, tail of K and node/eigenvalue counts across the Kneser threshold.

Writes a CSV (c, tail_inf, tail_sup, verdict, node_count, eig_count) to stdout.
"""

import argparse
import csv
import sys

import numpy as np

from jacobi_osc import classify, criterion_series, kneser_family, nodes_equal_counts
from jacobi_osc.recurrence import fmt_float


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--c-min", type=float, default=0.0)
    p.add_argument("--c-max", type=float, default=0.5)
    p.add_argument("--points", type=int, default=51)
    p.add_argument("--nmax", type=int, default=100_000)
    p.add_argument("--margin", type=float, default=1e-3)
    args = p.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["c", "tail_inf", "tail_sup", "verdict", "node_count", "eig_count"])
    for c in np.round(np.linspace(args.c_min, args.c_max, args.points), 12):
        model = kneser_family(float(c))
        res = classify(criterion_series(model, args.nmax), args.margin)
        nodes, count, _ = nodes_equal_counts(model, 0.0, args.nmax)
        ev = res.evidence
        w.writerow([fmt_float(c), fmt_float(ev.tail_inf), fmt_float(ev.tail_sup), res.verdict.value, nodes, count])


if __name__ == "__main__":
    main()
