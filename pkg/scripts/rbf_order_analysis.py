"""Order-preserving vs. regression surrogate on the 2-D radial bump.

Fits both surrogates on 200 LHS samples over [-6, 6]^2 for several seeds and
reports Spearman's rho against -f on a 33 x 33 held-out grid, plus the OPC
type of the bump and of its inverse.

Usage: python3 scripts/rbf_order_analysis.py [--seeds 10] [--train-size 200]
"""

import argparse

import numpy as np

from opbo.harness.diagnose import diagnose, heldout_rho, sample_values


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--train-size", type=int, default=200)
    args = ap.parse_args()

    rows = []
    for seed in range(args.seeds):
        r_op = heldout_rho("op", seed, n_train=args.train_size)
        r_nn = heldout_rho("nn", seed, n_train=args.train_size)
        rows.append((r_op, r_nn))
        print(f"seed {seed:2d}  op rho={r_op:.4f}  nn rho={r_nn:.4f}")
    rows = np.array(rows)
    print(f"median     op rho={np.median(rows[:, 0]):.4f}  nn rho={np.median(rows[:, 1]):.4f}")
    print(f"op >= 0.90 in {int(np.sum(rows[:, 0] >= 0.9))}/{args.seeds} seeds")

    for fn in ("rbf", "inverse_rbf"):
        rep = diagnose(sample_values(fn, 2, 2000, 0))
        print(f"{fn:12s} OPC {rep['opc_type']:8s} signed area {rep['signed_area']:+.4f}  y(0.5) {rep['half_value']:.4f}")


if __name__ == "__main__":
    main()
