"""Empirical Neumann constants on the unit disk for Moebius data approaching the boundary.

c_n_est should approach 3 and d_n_est stays at 2 as |c| -> 1.  Nodes must
grow with 1/(1-|c|) for the boundary data to be resolved.

    python3 scripts/disk_neumann_family.py
"""

import argparse
import math

import numpy as np

from spectrabound.geometry import Disk
from spectrabound.neumann import estimate_cn, mobius


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--angles", type=int, default=8)
    ap.add_argument("--moduli", type=float, nargs="*", default=[0.5, 0.9, 0.95, 0.99, 0.995])
    args = ap.parse_args()

    disk = Disk(0.0, 1.0)
    print(f"{'|c|':>7} {'nodes':>6} {'c_n_est':>10} {'d_n_est':>10}")
    for m in args.moduli:
        n = int(2 ** math.ceil(math.log2(max(256, 20 / (1 - m)))))
        fam = [mobius(m * np.exp(2j * math.pi * k / args.angles)) for k in range(args.angles)]
        c_n, d_n = estimate_cn(disk, fam, n=n)
        print(f"{m:7.3f} {n:6d} {c_n:10.6f} {d_n:10.6f}")


if __name__ == "__main__":
    main()
