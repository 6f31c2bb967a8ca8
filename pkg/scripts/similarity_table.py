"""Condition number X of the 2x2 ellipse similarity as a function of the minor axis gamma.

    python3 scripts/similarity_table.py
"""

import argparse

import numpy as np

from spectrabound.similarity import build_similarity, degree_one_trials


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--degree-one-trials", type=int, default=50)
    args = ap.parse_args()

    print(f"{'gamma':>8} {'rho':>9} {'a(1)':>9} {'X':>10} {'terms':>6} {'||B||-1':>9} {'quad res':>9}")
    for g in np.geomspace(1e-3, 1e3, 13):
        s = build_similarity(g)
        print(f"{g:8.3g} {s.rho:9.4f} {s.a1:9.6f} {s.X:10.7f} {s.series_terms:6d} "
              f"{s.b_norm_error:9.1e} {s.quadratic_residual:9.1e}")

    if args.degree_one_trials:
        r = degree_one_trials(trials=args.degree_one_trials)
        print(f"\ndegree-one matrix polynomials: {r.size} trials, max ratio {r.max():.5f} (bound 2)")


if __name__ == "__main__":
    main()
