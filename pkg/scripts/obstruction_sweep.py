"""Where the lattice count overtakes the packing bound, for d = 1..6.

Reports the first crossing on a log grid of depth --k-max and the exact
crossing complement from bisection in log u.
"""
import argparse
import csv
import sys

from pickmetrics.geodesy import estimate_M
from pickmetrics.packing import crossing_complement, log_grid, obstruction_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k-max", type=int, default=130)
    ap.add_argument("--eps", type=float, default=0.8)
    ap.add_argument("--m", type=float, default=1.0)
    args = ap.parse_args()
    M = estimate_M([1.0 - 10.0**-k for k in range(1, 13)])
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["d", "u_crossing", "u_star_on_grid", "slope_lower", "slope_upper", "expected_upper"])
    for d in range(1, 7):
        rep = obstruction_report(d, args.m, args.m, args.eps, log_grid(args.k_max), M=M)
        lo, hi = rep.tail_slopes()
        u_star = "" if rep.u_star is None else f"{rep.u_star:.1e}"
        w.writerow([d, f"{crossing_complement(d, args.m, args.eps):.6e}", u_star,
                    f"{lo:.5f}", f"{hi:.5f}", f"{-d / (2 * d + 1):.5f}"])


if __name__ == "__main__":
    main()
