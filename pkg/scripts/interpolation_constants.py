"""Empirical k1..k7 at increasing truncations.

The L4/L-infinity ratios are dilation invariant in two dimensions, so their
band-limited suprema creep upwards with resolution; the table makes that visible.

    python3 scripts/interpolation_constants.py --resolutions 3 4 6 --trials 100
"""

import argparse
import csv

from micropolar.analysis import estimate_constant
from micropolar.spectral_core import Resolution

NAMES = ("k1", "k2", "k3", "k4", "k5", "k6", "k7")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--resolutions", type=int, nargs="+", default=[3, 4, 6])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="runs/constants.csv")
    args = ap.parse_args()

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["N", "name", "value", "trials", "maximizer"])
        for N in args.resolutions:
            for name in NAMES:
                est = estimate_constant(name, args.trials, Resolution(N, N), seed=args.seed)
                w.writerow([N, name, f"{est.value:.17g}", est.trials, est.maximizer])
                print(f"N={N} name={name} value={est.value:.6f} maximizer={est.maximizer}")


if __name__ == "__main__":
    main()
