#!/usr/bin/env python3
"""Print the generalized Sidon exponents and their worst anticommutator norms."""
import argparse

from qtorus.diophantine import anticommutator_check, sidon_sequences


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--theta", default="sqrt(2)-1")
    ap.add_argument("--horizon", type=int, default=10)
    args = ap.parse_args()
    pair = sidon_sequences(args.theta, args.horizon)
    rep = anticommutator_check(pair)
    worst = {}
    for row in rep["rows"]:
        worst[row["n"]] = max(worst.get(row["n"], 0.0), row["formula"])
    print(f"{'n':>3} {'k_n':>24} {'l_n':>24} {'max_j |e_n e_j + e_j e_n|':>28} {'2^(1-n)':>10}")
    for n in range(1, args.horizon + 1):
        k, l = pair.monomial(n)
        w = worst.get(n, float("nan"))
        print(f"{n:3d} {k:24d} {l:24d} {w:28.3e} {2.0 ** (1 - n):10.3e}")
    print("violations:", rep["violations"] or "none")
    return 1 if rep["violations"] else 0


if __name__ == "__main__":
    raise SystemExit(main())
