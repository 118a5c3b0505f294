#!/usr/bin/env python3
"""Trace the Chafee-Infante pitchfork cascade f = lam (u - u^3).

Sweeps lam over a range, prints the equilibrium count and Morse data per
branch at each value, and localizes the hyperbolicity crossings of the
trivial branch by bisection (expected at pi^2, 4 pi^2, ...).

Usage:
    python scripts/chafee_bifurcation.py --lam-min 5 --lam-max 45 --steps 9
"""

import argparse

import numpy as np

from neqlab.perturb import bifurcation_sweep
from neqlab.problem import ProblemSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lam-min", type=float, default=5.0)
    ap.add_argument("--lam-max", type=float, default=45.0)
    ap.add_argument("--steps", type=int, default=9)
    ap.add_argument("--scan-bound", type=float, default=2.0)
    args = ap.parse_args()

    spec = ProblemSpec(
        a_coeffs=(1.0,),
        f_coeffs=(0.0, 1.0, 0.0, -1.0),
        scan_bound=args.scan_bound,
    )
    sweep = bifurcation_sweep(spec, (args.lam_min, args.lam_max), args.steps)

    print(f"{'lam':>10}  {'#eq':>4}  branches (u0: morse/hyperbolic)")
    for row in sweep.rows:
        branches = "  ".join(
            f"{e.u0:+.4f}:{e.n_positive}/{e.hyperbolic[0]}" for e in row.entries
        )
        print(f"{row.parameter:10.4f}  {row.n_equilibria:4d}  {branches}")

    print("\ntrivial-branch crossings (bisected):")
    for lam in sweep.crossings:
        nearest = round(np.sqrt(lam) / np.pi)
        print(f"  lam = {lam:.8f}   (n pi)^2 for n = {nearest}: "
              f"{(nearest * np.pi) ** 2:.8f}")


if __name__ == "__main__":
    main()
