#!/usr/bin/env python3
"""Search the doubled algebras for zero divisors, level by level.

Levels 1..3 are division algebras and the search proves nothing there; from
level 4 on a two-term basis pair (x, y) with x*y identically zero exists and
is found by scanning the signed multiplication table.  Each hit is certified
by an exact product before being reported.
"""

import argparse
import time

import numpy as np

from cdfun import find_zero_divisor, mul


def describe(z) -> str:
    terms = []
    for k, v in enumerate(z.coeffs):
        if v != 0.0:
            sign = "-" if v < 0 else "+" if terms else ""
            mag = "" if abs(v) == 1.0 else f"{abs(v):g}*"
            terms.append(f"{sign}{mag}e{k}")
    return " ".join(terms) or "0"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-level", type=int, default=6)
    args = ap.parse_args()

    print(f"{'level':>5} {'dim':>5} {'seconds':>8}  pair")
    for r in range(1, args.max_level + 1):
        t0 = time.perf_counter()
        pair = find_zero_divisor(r)
        dt = time.perf_counter() - t0
        if pair is None:
            print(f"{r:>5} {2**r:>5} {dt:>8.3f}  none (division algebra)")
            continue
        x, y = pair
        prod = mul(x, y)
        assert np.all(prod.coeffs == 0.0), "search returned an uncertified pair"
        print(f"{r:>5} {2**r:>5} {dt:>8.3f}  ({describe(x)}) * ({describe(y)}) = 0")


if __name__ == "__main__":
    main()
