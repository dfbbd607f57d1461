"""Node locations of the Kneser solution and their consecutive ratios.

Above the threshold the nodes grow geometrically with ratio
exp(pi / sqrt(c - 1/4)); the last column compares against that value.
"""

import argparse
import math

from jacobi_osc import kneser_family, solve_recurrence


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--c", type=float, nargs="+", default=[0.5, 1.0, 2.25, 4.0])
    p.add_argument("--nmax", type=int, default=10**6)
    args = p.parse_args()

    print("c,node,ratio,predicted")
    for c in args.c:
        predicted = math.exp(math.pi / math.sqrt(c - 0.25)) if c > 0.25 else math.inf
        nodes = solve_recurrence(kneser_family(c), 0.0, (1.0, 1.0), args.nmax).nodes
        prev = None
        for n in nodes:
            ratio = "" if prev is None else repr(n / prev)
            print(f"{c!r},{n},{ratio},{predicted!r}")
            prev = n


if __name__ == "__main__":
    main()
