"""OPC shape classes for synthetic curves and for the benchmark functions.

Usage: python3 scripts/opc_types_demo.py [--dim 100] [--samples 5000]
"""

import argparse

import numpy as np

from opbo.benchfn import FUNCTION_NAMES
from opbo.harness.diagnose import sample_values
from opbo.metrics import build_opc

SYNTHETIC = {
    "y = x^2": lambda x: x**2,
    "smoothstep": lambda x: 3 * x**2 - 2 * x**3,
    "y = x": lambda x: x,
    "inverse smoothstep": lambda x: 2 * x - 3 * x**2 + 2 * x**3,
    "y = sqrt(x)": np.sqrt,
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dim", type=int, default=100)
    ap.add_argument("--samples", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    x = np.linspace(0, 1, 1001)
    for name, f in SYNTHETIC.items():
        c = build_opc(f(x))
        print(f"{name:20s} {c.opc_type:9s} area {c.signed_area:+.4f}")
    print()
    for name in FUNCTION_NAMES:
        c = build_opc(sample_values(name, args.dim, args.samples, args.seed))
        print(f"{name}-d{args.dim:<8d} {c.opc_type:9s} area {c.signed_area:+.4f}  y(0.5) {c.half_value:.4f}")


if __name__ == "__main__":
    main()
