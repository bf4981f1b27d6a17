#!/usr/bin/env python3
"""Adjudicate the printed expansion tables against the product oracle.

Runs in exact rational arithmetic so every verdict is an equality, not a
tolerance call.  Pick rapidities with a nonzero sum and a coupling other
than 1, otherwise some of the disputed terms coincide numerically and
the corresponding slots legitimately report a match.
"""

import argparse
import sys
from fractions import Fraction

from qnls.transfer import charge_coefficients_from_formulas


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rapidities", default="1,2,3",
                        help="comma-separated rationals, e.g. '1/2,2,7/3'")
    parser.add_argument("--coupling", default="3/2", help="rational coupling")
    args = parser.parse_args(argv)

    raps = sorted(Fraction(t) for t in args.rapidities.split(","))
    c = Fraction(args.coupling)
    result = charge_coefficients_from_formulas(raps, c)

    print(f"rapidities = {[str(r) for r in raps]}, coupling = {c}")
    print("\noracle coefficients (orders 1..4 of the eigenvalue product):")
    for m, val in enumerate(result.oracle, start=1):
        print(f"  order {m}: {complex(val):.6g}")
    print("\nper-source verdicts:")
    print(f"{'source':>26} {'order':>5} {'verdict':>18}  printed vs oracle")
    for v in result.verdicts:
        gap = "" if v.match else \
            f"  {v.printed:.6g} != {v.oracle:.6g}"
        print(f"{v.source:>26} {v.order:>5} {v.verdict:>18}{gap}")
    print("\nalternative reading (momentum charge without the i factor):")
    for v in result.h1_alternative:
        print(f"{v.source:>26} {v.order:>5} {v.verdict:>18}")
    return 0 if not result.has_unexpected_mismatch() else 1


if __name__ == "__main__":
    sys.exit(main())
