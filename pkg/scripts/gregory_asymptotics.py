"""Tabulate c_n n log(n)^2 together with the Wendel bounds on c_n."""
import argparse
import csv
import math
import sys

from pickmetrics.gregory import asymptotic_check, corrected_integral, wendel_bounds, wendel_sandwich


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-exp", type=int, default=6, help="largest n is 10**max_exp")
    args = ap.parse_args()
    ns = [10**k for k in range(1, args.max_exp + 1)]
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "ratio", "wendel_lower_ratio", "wendel_upper_ratio", "corrected_ratio", "sandwich_ok"])
    for n, ratio in asymptotic_check(ns):
        scale = n * math.log(n) ** 2
        lo, hi = wendel_bounds(n)
        ci = corrected_integral(n)
        slo, shi = wendel_sandwich(n)
        w.writerow([n, f"{ratio:.17g}", f"{lo * scale:.17g}", f"{hi * scale:.17g}",
                    f"{ci * scale:.17g}", slo <= ci <= shi])


if __name__ == "__main__":
    main()
