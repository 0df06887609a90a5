"""Aggregate trace files into convergence curves and a mean-rank table.

Only ``traces/*.csv`` are read; trial ids encode ``problem__algorithm__tNNN``.
"""

from __future__ import annotations

import json
from collections import defaultdict
from pathlib import Path

import numpy as np

from ..errors import MissingCell
from ..metrics import mean_rank_table
from .experiment import atomic_write, read_trace, trace_runtime


def split_trial_id(trial_id: str) -> tuple[str, str, int]:
    problem, algorithm, t = trial_id.split("__")
    return problem, algorithm, int(t.lstrip("t"))


def _step_values(evals: np.ndarray, incumbents: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Incumbent after ``grid[j]`` evaluations (NaN before the first row)."""
    pos = np.searchsorted(evals, grid, side="right") - 1
    out = np.full(grid.shape, np.nan)
    ok = pos >= 0
    out[ok] = incumbents[pos[ok]]
    return out


def _quantiles(a) -> tuple[float, float, float]:
    q25, med, q75 = np.percentile(np.asarray(a, dtype=np.float64), [25, 50, 75])
    return float(q25), float(med), float(q75)


def summarize(results_dir: str | Path, write: bool = True) -> dict:
    root = Path(results_dir)
    trials: dict[tuple[str, str], list[tuple[int, list[dict]]]] = defaultdict(list)
    for path in sorted((root / "traces").glob("*.csv")):
        problem, algorithm, t = split_trial_id(path.stem)
        trials[(problem, algorithm)].append((t, read_trace(path)))

    problems = sorted({p for p, _ in trials})
    algorithms = sorted({a for _, a in trials})
    for p in problems:
        for a in algorithms:
            if (p, a) not in trials:
                raise MissingCell(p, a)

    cells: dict[str, dict[str, dict]] = {p: {} for p in problems}
    runtimes: dict[str, list[float]] = defaultdict(list)
    for (p, a), items in sorted(trials.items()):
        items.sort(key=lambda it: it[0])
        finals, curves = [], []
        for _, rows in items:
            evals = np.array([int(r["evals_cumulative"]) for r in rows])
            inc = np.array([float(r["incumbent_y"]) for r in rows])
            finals.append(float(inc[-1]))
            curves.append((evals, inc))
            runtimes[a].append(trace_runtime(rows))
        grid = np.unique(np.concatenate([e for e, _ in curves]))
        stacked = np.vstack([_step_values(e, i, grid) for e, i in curves])
        q = np.array([_quantiles(col[~np.isnan(col)]) if np.any(~np.isnan(col)) else (np.nan,) * 3
                      for col in stacked.T]).reshape(-1, 3)
        q25f, medf, q75f = _quantiles(finals)
        cells[p][a] = {
            "n_trials": len(items),
            "final_incumbents": finals,
            "median": medf,
            "q25": q25f,
            "q75": q75f,
            "runtime_mean": float(np.mean(runtimes[a][-len(items):])),
            "curve": {
                "evals": grid.tolist(),
                "q25": q[:, 0].tolist(),
                "median": q[:, 1].tolist(),
                "q75": q[:, 2].tolist(),
            },
        }

    tavg = {a: float(np.mean(v)) for a, v in sorted(runtimes.items())}
    table = mean_rank_table({p: {a: cells[p][a]["median"] for a in algorithms} for p in problems}, tavg, algorithms)
    summary = {"problems": problems, "algorithms": algorithms, "cells": cells, "rank_table": table.to_dict()}
    if write:
        atomic_write(root / "summary.json", json.dumps(summary, indent=2, sort_keys=True))
        atomic_write(root / "rank_table.csv", table.to_csv())
    summary["_table"] = table
    return summary


def load_summary(results_dir: str | Path) -> dict:
    return json.loads((Path(results_dir) / "summary.json").read_text())
