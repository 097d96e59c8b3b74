#!/usr/bin/env python3
"""Run every CLI experiment with its default configuration.

Writes one JSON report per experiment into the output directory and prints a
status line for each.  Exit status is the largest exit code seen.
"""
import argparse
import json
import pathlib
import time

from qtorus import cli


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--only", nargs="*", choices=list(cli.EXPERIMENTS))
    args = ap.parse_args()
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    worst = 0
    for name in args.only or cli.EXPERIMENTS:
        path = out / f"{name}.json"
        t0 = time.perf_counter()
        code = cli.main([name, "--out", str(path)])
        doc = json.loads(path.read_text())
        print(f"{name:15s} exit={code} status={doc['status']:4s} rows={len(doc['rows']):4d} "
              f"{time.perf_counter() - t0:6.1f}s  {doc['config_hash'][:12]}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    raise SystemExit(main())
