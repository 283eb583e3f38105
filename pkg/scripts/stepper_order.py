"""Self-convergence of the time steppers against a dt/64 reference.

    python3 scripts/stepper_order.py --N 8 --out runs/order.csv
"""

import argparse
import csv

import numpy as np

from micropolar.dynamics import Bases, StepperConfig, simulate
from micropolar.presets import get_preset
from micropolar.spectral_core import DomainSpec, Resolution


def final_coeffs(s0, p, dt, scheme, nonlinear, t_end):
    cfg = StepperConfig(dt=dt, scheme=scheme, t_end=t_end, ledger_stride=10**9)
    traj, _ = simulate(s0, p, cfg, nonlinear=nonlinear)
    return np.concatenate([c.ravel() for c in traj.final.coefficient_arrays()])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=8)
    ap.add_argument("--t-end", type=float, default=0.1)
    ap.add_argument("--dts", type=float, nargs="+", default=[1e-3, 5e-4, 2.5e-4])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="runs/stepper_order.csv")
    args = ap.parse_args()

    bases = Bases.build(DomainSpec(1.0), Resolution(args.N, args.N))
    rows = []
    for preset_name, nonlinear in (("H1", False), ("smallRa", True)):
        preset = get_preset(preset_name)
        p = preset.physparams()
        s0 = preset.initial_state(bases, seed=args.seed)
        for scheme in ("imex_euler", "cnab2"):
            ref = final_coeffs(s0, p, min(args.dts) / 64, scheme, nonlinear, args.t_end)
            errs = [np.linalg.norm(final_coeffs(s0, p, dt, scheme, nonlinear, args.t_end) - ref) for dt in args.dts]
            slope = np.polyfit(np.log(args.dts), np.log(errs), 1)[0]
            print(f"preset={preset_name} nonlinear={int(nonlinear)} scheme={scheme} slope={slope:.4f}")
            rows += [(preset_name, int(nonlinear), scheme, dt, e, slope) for dt, e in zip(args.dts, errs)]
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["preset", "nonlinear", "scheme", "dt", "error", "slope"])
        w.writerows(rows)


if __name__ == "__main__":
    main()
