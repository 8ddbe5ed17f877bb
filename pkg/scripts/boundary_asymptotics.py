"""Radial-length ratio and circle-lattice gap as r -> 1, both in terms of u = 1 - r.

The radial ratio ell(r) / sqrt(log(1/u)) tends to 1 and the lattice gap
delta(r e^{i sqrt(u)}, r) tends to sqrt(3/4), both slowly and from below.
"""
import argparse
import csv
import sys

from pickmetrics.geodesy import radial_ratio
from pickmetrics.packing import SQRT_3_4, circle_gap


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-exp", type=int, default=15)
    args = ap.parse_args()
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["u", "radial_ratio", "circle_gap", "gap_deficit"])
    for k in range(2, args.max_exp + 1):
        u = 10.0**-k
        gap = circle_gap(u=u)
        w.writerow([f"{u:.1e}", f"{radial_ratio(u=u):.12f}", f"{gap:.12f}", f"{SQRT_3_4 - gap:.3e}"])


if __name__ == "__main__":
    main()
