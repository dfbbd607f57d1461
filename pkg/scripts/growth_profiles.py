"""Eigenvalue counts below lambda on growing Dirichlet sections.

A saturating count suggests finitely many eigenvalues below the edge, steady
growth per decade suggests infinitely many.  Close to the threshold the
nodes are so sparse (loglog(1, -0.3) included) that a count can look
saturated at any desk-scale N; the criterion is the decisive tool there.
"""

import argparse

from jacobi_osc import growth_profile, kneser_family, loglog_family

MODELS = {
    "kneser(0.2)": lambda: kneser_family(0.2),
    "kneser(0.3)": lambda: kneser_family(0.3),
    "kneser(2.25)": lambda: kneser_family(2.25),
    "loglog(1, 0.2)": lambda: loglog_family(1, 0.2),
    "loglog(1, -0.3)": lambda: loglog_family(1, -0.3),
}


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--lam", type=float, default=0.0)
    p.add_argument("--decades", type=int, default=6)
    args = p.parse_args()

    sizes = [10**d for d in range(2, args.decades + 1)]
    print("model," + ",".join(f"N={n}" for n in sizes) + ",hint")
    for name, make in MODELS.items():
        prof = growth_profile(make(), args.lam, sizes)
        print(f"{name}," + ",".join(map(str, prof.counts)) + f",{prof.verdict_hint}")


if __name__ == "__main__":
    main()
