"""Witness search over synthetic pencils and reducible g = 4 tubes.

    python3 scripts/witness_sweep.py --seeds 50
"""
import argparse
import time

from lsk.classify import isoparametric_witness, reducibility_detect, replay_residual
from lsk.corpus import REM34_EXAMPLES, cone_tube_families, synthetic_isoparametric_pencil


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--tol", type=float, default=1e-8)
    ap.add_argument("--skip-tubes", action="store_true")
    args = ap.parse_args()

    t0 = time.perf_counter()
    worst, misses = 0.0, []
    for seed in range(args.seeds):
        for conj in (False, True):
            sp = synthetic_isoparametric_pencil(seed, args.n, conjugate=conj)
            res = isoparametric_witness(sp.families, args.tol)
            if not res.found:
                misses.append((seed, conj, res.status))
                continue
            ks = [sp.families[i].reps for i in res.ordering]
            worst = max(worst, replay_residual(ks, res.witness.W1, res.witness.W2))
    print(f"synthetic: {2 * args.seeds} pencils, misses {misses}, worst residual {worst:.2e} "
          f"({time.perf_counter() - t0:.1f}s)")
    if args.skip_tubes:
        return
    for ex in REM34_EXAMPLES:
        t1 = time.perf_counter()
        _, fams = cone_tube_families(ex["p"], ex["eps"], 4, ex["seed"])
        res = isoparametric_witness(fams, args.tol)
        red = reducibility_detect(fams)
        print(f"cone tube {ex}: witness {res.status}, reducible {red.reducible} "
              f"spans {red.family_spans} ({time.perf_counter() - t1:.1f}s)")


if __name__ == "__main__":
    main()
