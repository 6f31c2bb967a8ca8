"""Sector constants as functions of the half-angle, and where the two C_cb bounds cross.

    python3 scripts/regime_crossover.py --points 12
"""

import argparse
import math

import numpy as np
from scipy.optimize import brentq

from spectrabound.bounds import bound_neumann_angle, bound_neumann_sector_sharp, bound_sector_calculus


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=12)
    args = ap.parse_args()

    print(f"{'alpha/pi':>9} {'calculus':>10} {'angle C_cb':>11} {'sharp C_cb':>11} {'sharp C_N':>10}")
    for frac in np.linspace(0.02, 0.5, args.points):
        a = frac * math.pi
        calc = bound_sector_calculus(a).value
        ang = bound_neumann_angle(a)[1].value
        cn, ccb = bound_neumann_sector_sharp(a)
        print(f"{frac:9.4f} {calc:10.5f} {ang:11.5f} {ccb.value:11.5f} {cn.value:10.5f}")

    root = brentq(lambda a: bound_neumann_angle(a)[1].value - bound_sector_calculus(a).value,
                  0.2 * math.pi, 0.45 * math.pi, xtol=1e-14)
    print(f"\ncrossover: alpha = {root / math.pi:.12f} pi")
    print("the angle bound is the smaller one above the crossover")


if __name__ == "__main__":
    main()
