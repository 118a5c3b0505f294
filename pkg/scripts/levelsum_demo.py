#!/usr/bin/env python3
"""Level-set sum identities on the model profile u = cos(2 pi x).

For phi(x) = u'(x) h(u(x)) the weighted sum of phi/|u'| over each regular
level set vanishes, as do the moments of phi against powers of u.  At the
critical levels q = +-1 the half-weighted curvature sum equals 1/(2 pi).

Usage:
    python scripts/levelsum_demo.py [--seed 7]
"""

import argparse

import numpy as np

from neqlab.levelsets import critical_sum, orthogonality_residuals, regular_sum
from neqlab.profiles import cos_profile

POLY = np.polynomial.polynomial


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    prof = cos_profile(2.0)
    rng = np.random.default_rng(args.seed)
    h = rng.normal(size=6)
    phi = lambda x: prof.du(x) * POLY.polyval(prof.u(x), h)

    print("random h coefficients:", np.array2string(h, precision=4))
    res = orthogonality_residuals(prof, phi, 10)
    print("\nmoments of phi against u^k, k = 0..10:")
    for k, r in enumerate(res):
        print(f"  k = {k:2d}: {r:+.3e}")

    print("\nregular sums of phi/|u'| at sample levels:")
    for q in (-0.7, -0.2, 0.3, 0.8):
        print(f"  q = {q:+.2f}: {regular_sum(prof, phi, q):+.3e}")

    one = lambda x: np.ones_like(np.asarray(x, dtype=float))
    print("\ncritical sums with phi = 1 (expect 1/(2 pi) = "
          f"{1.0 / (2.0 * np.pi):.10f}):")
    for q in (1.0, -1.0):
        print(f"  q = {q:+.0f}: {critical_sum(prof, one, q):.10f}")

    print("\nnegative control phi = u (not of the form u' h(u)):")
    bad = lambda x: prof.u(x)
    print(f"  max moment residual: {max(abs(r) for r in orthogonality_residuals(prof, bad, 4)):.3e}")
    print(f"  regular sum at q = 0.3: {regular_sum(prof, bad, 0.3):+.3e}")


if __name__ == "__main__":
    main()
