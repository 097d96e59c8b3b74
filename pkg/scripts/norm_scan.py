#!/usr/bin/env python3
"""Lower bounds for a multiplier norm along the convergent ladder of theta.

Prints one line per rung and degree so growth with the denominator is visible.
"""
import argparse
from fractions import Fraction

from qtorus.diophantine import cf_convergents
from qtorus.multipliers import OptimizerConfig, degree_scan, load_symbol
from qtorus.cli import parse_p


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--symbol", default="pisier:0:2")
    ap.add_argument("--theta", default="(sqrt(5)-1)/2")
    ap.add_argument("--p", default="4")
    ap.add_argument("--degrees", default="1,2")
    ap.add_argument("--ladder", type=int, default=4)
    ap.add_argument("--restarts", type=int, default=4)
    ap.add_argument("--iterations", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    phi = load_symbol(args.symbol)
    p = parse_p(args.p)
    degrees = [int(v) for v in args.degrees.split(",")]
    cfg = OptimizerConfig(restarts=args.restarts, iterations=args.iterations, seed=args.seed)
    rungs = [Fraction(0)] + [c.fraction for c in cf_convergents(args.theta, args.ladder)]
    for th in rungs:
        for deg, est in zip(degrees, degree_scan(phi, p, th, degrees, cfg)):
            print(f"theta={str(th):>8} degree={deg} lower bound={est.value:.6f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
