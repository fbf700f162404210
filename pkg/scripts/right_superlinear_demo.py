#!/usr/bin/env python3
"""How large is the space of right-superlinear polynomial maps?

Solves the full Cauchy-Riemann coefficient system on homogeneous polynomial
maps and prints the nullspace dimension per (level, degree).  Degree 1 always
gives the left multiplications z -> c*z (dimension 2^r); from degree 2 on the
system is overdetermined enough that only the zero map survives, so the
everywhere-right-superlinear polynomials are exactly the affine maps a + c*z.

A sampled degree-1 map is then pushed through the finite-difference check:
central differences are exact on affine maps, so its residual sits at rounding
level for every step, while z^3 (right-superlinear only at real points) shows
the generic O(step^2) decay there.
"""

import argparse

import numpy as np

from cdfun import (
    RealFieldSample,
    cr_check,
    from_real,
    random_element,
    right_superlinear_nullspace,
    right_superlinear_sample,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--max-level", type=int, default=3)
    ap.add_argument("--max-degree", type=int, default=3)
    args = ap.parse_args()

    print("nullspace dimension of the right-superlinear system")
    header = " ".join(f"deg {n}" for n in range(1, args.max_degree + 1))
    print(f"{'level':>5}  {header}")
    for r in range(2, args.max_level + 1):
        dims = []
        for degree in range(1, args.max_degree + 1):
            _, basis = right_superlinear_nullspace(r, degree)
            dims.append(len(basis))
        print(f"{r:>5}  " + " ".join(f"{d:>5}" for d in dims))

    rng = np.random.default_rng(args.seed)
    level = min(args.max_level, 3)
    z = random_element(level, rng)
    a = from_real(level, 0.6)
    print(f"\nfinite-difference residuals at level {level}:")
    print(f"{'step':>8} {'degree-1 map':>14} {'z^3 at 0.6':>14}")
    for step in (1e-2, 5e-3, 2.5e-3):
        sample = right_superlinear_sample(level, 1, np.random.default_rng(args.seed), step=step)
        flat = cr_check(sample, z, threshold=1.0).max_residual
        curved = cr_check(RealFieldSample.from_expression("z^3", level, step=step), a,
                          threshold=1.0).max_residual
        print(f"{step:>8.1e} {flat:>14.2e} {curved:>14.2e}")


if __name__ == "__main__":
    main()
