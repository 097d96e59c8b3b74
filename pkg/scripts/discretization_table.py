#!/usr/bin/env python3
"""Tabulate empirical norms of the circle-to-cyclic discretization against the sinc bounds."""
import argparse
import math

from qtorus.transference import empirical_jdn_norms


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(f"{'d':>3} {'n':>4} {'p':>4} {'forward':>9} {'bound':>9} {'inverse':>9} {'bound':>9}")
    bad = 0
    for d, n in [(1, 4), (2, 8), (4, 32), (8, 128)]:
        for p in (1, 2, 4, math.inf):
            r = empirical_jdn_norms(d, n, p, args.samples, args.seed)
            bad += r["forward_max"] > r["forward_bound"] + 1e-9
            bad += r["inverse_max"] > r["inverse_bound"] + 1e-9
            print(f"{d:3d} {n:4d} {p:>4} {r['forward_max']:9.5f} {r['forward_bound']:9.5f} "
                  f"{r['inverse_max']:9.5f} {r['inverse_bound']:9.5f}")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
