"""Run the shipped corpus and print a one-line verdict per entry.

    python3 scripts/run_corpus.py [--seed 0] [--name torus ...]
"""
import argparse
import sys
import time

from lsk.corpus import load_corpus
from lsk.runner import run_corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--name", action="append", default=[])
    args = ap.parse_args()

    entries = [e for e in load_corpus() if not args.name or e.name in args.name]
    bad = 0
    for e in entries:
        t0 = time.perf_counter()
        (r,) = run_corpus([e], args.seed)
        bad += not r["ok"]
        status = "ok" if r["ok"] else f"MISMATCH {r['mismatched']}"
        print(f"{e.name:32s} {status:10s} {time.perf_counter() - t0:6.1f}s  {r['actual']}")
    sys.exit(1 if bad else 0)


if __name__ == "__main__":
    main()
