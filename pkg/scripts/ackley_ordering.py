"""Desk-scale Ackley d=100 comparison at a matched 510-evaluation budget.

Usage: python3 scripts/ackley_ordering.py [--seeds 10] [--algorithms opbo-op random bo-gp] [--out file.json]
"""

import argparse
import json
import time

import numpy as np

from opbo.harness.desk import ALGORITHMS, final_incumbents


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--algorithms", nargs="+", default=["opbo-op", "random", "bo-gp"], choices=sorted(ALGORITHMS))
    ap.add_argument("--workers", type=int)
    ap.add_argument("--out")
    args = ap.parse_args()

    results = {}
    for alg in args.algorithms:
        t0 = time.perf_counter()
        finals, evals = final_incumbents(alg, range(args.seeds), workers=args.workers)
        elapsed = time.perf_counter() - t0
        results[alg] = {"finals": finals.tolist(), "evaluations": evals.tolist(),
                        "median": float(np.median(finals)), "seconds": elapsed}
        print(f"{alg:9s} median={np.median(finals):.4f} evals={sorted(set(evals.tolist()))} "
              f"time={elapsed:.0f}s finals={np.round(finals, 3).tolist()}", flush=True)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(results, fh, indent=2)


if __name__ == "__main__":
    main()
