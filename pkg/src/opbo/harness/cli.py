"""Command-line entry point: ``opbo run|summarize|plot|diagnose|bench list``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from ..benchfn import FUNCTION_NAMES, ObjectiveFunction, known_minimum
from ..errors import OpboError
from .config import OUTPUT_ROOT_ENV, PRESETS, default_output_root, load_config, preset
from .diagnose import TOY_FUNCTIONS, diagnose, grid_2d, fit_toy_surrogate, sample_values
from .experiment import run_experiment
from .plots import export_plots
from .summary import summarize


def _cmd_run(args) -> int:
    if args.config:
        cfg = load_config(args.config)
    elif args.preset:
        cfg = preset(args.preset)
    else:
        print("run needs a config file or --preset", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg = replace(cfg, base_seed=args.seed)
    if args.parallelism is not None:
        cfg = replace(cfg, parallelism=args.parallelism)
    out = args.out or cfg.output_dir or default_output_root() / cfg.name
    path = run_experiment(cfg, out)
    print(path)
    return 0


def _cmd_summarize(args) -> int:
    summary = summarize(args.dir)
    table = summary["_table"]
    print(table.to_csv(), end="")
    return 0


def _cmd_plot(args) -> int:
    root = Path(args.dir)
    if not (root / "summary.json").exists():
        summarize(root)
    for p in export_plots(root, args.out):
        print(p)
    return 0


def _cmd_diagnose(args) -> int:
    if args.values:
        values = np.asarray(json.loads(Path(args.values).read_text()), dtype=np.float64)
        report = diagnose(values)
    else:
        seed = 0 if args.seed is None else args.seed
        values = sample_values(args.function, args.dim, args.samples, seed)
        scores = truth = None
        if args.fit and args.function in TOY_FUNCTIONS:
            fn = TOY_FUNCTIONS[args.function]
            _, utility = fit_toy_surrogate(args.fit, fn, args.train_size, seed)
            G = grid_2d()
            scores, truth = utility(G), fn(G)
        report = diagnose(values, scores, truth)
        report["function"] = args.function
        if args.fit:
            report["surrogate"] = args.fit
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def _cmd_bench(args) -> int:
    for name in FUNCTION_NAMES:
        fn = ObjectiveFunction(name, 2)
        xmin, fmin = known_minimum(fn)
        print(f"{name:11s} bounds=[{fn.lower_bound:g}, {fn.upper_bound:g}]^d  f*={fmin:g}  "
              f"x*(d=2)={np.array2string(xmin, precision=4)}")
    print("presets: " + ", ".join(sorted(PRESETS)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="opbo", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="execute a trial matrix")
    r.add_argument("config", nargs="?", help="experiment config (JSON)")
    r.add_argument("--preset", choices=sorted(PRESETS))
    r.add_argument("--seed", type=int, help="override base_seed")
    r.add_argument("--parallelism", type=int)
    r.add_argument("--out", help=f"output directory (default ${OUTPUT_ROOT_ENV}/<name>)")
    r.set_defaults(func=_cmd_run)

    s = sub.add_parser("summarize", help="median curves and mean-rank table")
    s.add_argument("dir")
    s.set_defaults(func=_cmd_summarize)

    pl = sub.add_parser("plot", help="SVG convergence charts")
    pl.add_argument("dir")
    pl.add_argument("--out", help="plot directory (default <dir>/plots)")
    pl.set_defaults(func=_cmd_plot)

    d = sub.add_parser("diagnose", help="OPC type and rank correlation report")
    d.add_argument("--function", default="rbf", choices=sorted(TOY_FUNCTIONS) + list(FUNCTION_NAMES))
    d.add_argument("--dim", type=int, default=2)
    d.add_argument("--samples", type=int, default=2000)
    d.add_argument("--seed", type=int)
    d.add_argument("--fit", choices=("op", "nn"), help="fit a surrogate on the 2-D toy and report held-out rho")
    d.add_argument("--train-size", type=int, default=200)
    d.add_argument("--values", help="JSON array of performance values instead of sampling")
    d.set_defaults(func=_cmd_diagnose)

    b = sub.add_parser("bench", help="benchmark utilities")
    b.add_argument("action", choices=("list",))
    b.set_defaults(func=_cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except OpboError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
