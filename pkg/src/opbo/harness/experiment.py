"""Seeded trial matrices with resumable, atomically written outputs.

Layout of an output directory::

    config.resolved.json      fully resolved experiment config
    manifest.json             trial_id -> status (only the parent process writes it)
    traces/<trial_id>.csv     one row per iteration
    results/<trial_id>.json   config echo, final incumbent, runtime, version
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import tempfile
import traceback
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict
from pathlib import Path

from .. import __version__
from ..optimizer import OptimizationTrace, RunConfig, run
from .config import ExperimentConfig, TrialSpec, default_output_root, expand_trials

log = logging.getLogger(__name__)

TRACE_COLUMNS = (
    "trial_id", "iteration", "evals_cumulative", "suggested_count", "batch_best_y", "incumbent_y",
    "fit_seconds", "iter_seconds", "trust_region_L",
    # surrogate diagnostics, blank when not applicable
    "gp_lengthscale", "gp_signal_variance", "gp_noise_variance", "gp_log_marginal_likelihood", "final_loss",
)
TIMING_COLUMNS = ("fit_seconds", "iter_seconds")
_INFO_COLUMNS = {
    "gp_lengthscale": "lengthscale",
    "gp_signal_variance": "signal_variance",
    "gp_noise_variance": "noise_variance",
    "gp_log_marginal_likelihood": "log_marginal_likelihood",
    "final_loss": "final_loss",
}


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def trace_to_csv(trial_id: str, trace: OptimizationTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for r in trace.records:
        info = [_fmt(r.surrogate_info.get(key)) for key in _INFO_COLUMNS.values()]
        w.writerow([trial_id, r.iteration, r.evals_cumulative, r.suggested_count, _fmt(r.batch_best),
                    _fmt(r.incumbent), _fmt(r.fit_seconds), _fmt(r.iter_seconds), _fmt(r.trust_region_L), *info])
    return buf.getvalue()


def read_trace(path: Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def trace_runtime(rows: list[dict]) -> float:
    return float(sum(float(r["iter_seconds"]) for r in rows))


def run_trial(spec: TrialSpec, out_dir: Path) -> dict:
    """Execute one trial and write its trace and result files."""
    config = RunConfig.from_dict(spec.run_config)
    trace = run(config)
    text = trace_to_csv(spec.trial_id, trace)
    rows = list(csv.DictReader(io.StringIO(text)))
    result = {
        "trial_id": spec.trial_id,
        "problem": spec.problem_id,
        "algorithm": spec.algorithm_id,
        "trial": spec.trial,
        "seed": spec.seed,
        "config": spec.run_config,
        "final_incumbent": trace.best_y,
        "best_x": trace.best_x.tolist(),
        "evaluations": int(trace.records[-1].evals_cumulative),
        # summed from the trace so summaries can be rebuilt from traces alone
        "runtime_seconds": trace_runtime(rows),
        "version": __version__,
    }
    atomic_write(out_dir / "traces" / f"{spec.trial_id}.csv", text)
    atomic_write(out_dir / "results" / f"{spec.trial_id}.json", json.dumps(result, indent=2, sort_keys=True))
    return result


def _worker(spec_dict: dict, out_dir: str) -> tuple[str, str, str | None]:
    spec = TrialSpec(**spec_dict)
    try:
        run_trial(spec, Path(out_dir))
    except Exception as exc:  # recorded as TrialFailed, the matrix continues
        log.error("trial %s failed: %s", spec.trial_id, exc)
        return spec.trial_id, "failed", "".join(traceback.format_exception_only(type(exc), exc)).strip()
    return spec.trial_id, "ok", None


def load_manifest(out_dir: Path) -> dict:
    path = out_dir / "manifest.json"
    if not path.exists():
        return {"trials": {}}
    return json.loads(path.read_text())


def _write_manifest(out_dir: Path, manifest: dict) -> None:
    atomic_write(out_dir / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True))


def is_complete(out_dir: Path, manifest: dict, trial_id: str) -> bool:
    entry = manifest["trials"].get(trial_id)
    return (
        entry is not None
        and entry.get("status") == "ok"
        and (out_dir / "traces" / f"{trial_id}.csv").exists()
        and (out_dir / "results" / f"{trial_id}.json").exists()
    )


def run_experiment(config: ExperimentConfig, out_dir: str | Path | None = None,
                   parallelism: int | None = None) -> Path:
    out = Path(out_dir or config.output_dir or default_output_root() / config.name)
    out.mkdir(parents=True, exist_ok=True)
    workers = parallelism or config.parallelism

    specs = expand_trials(config)
    resolved = config.to_dict()
    resolved["output_dir"] = str(out)
    resolved.pop("parallelism")  # execution detail; outputs must not depend on it
    resolved["trials_resolved"] = [asdict(s) for s in specs]
    atomic_write(out / "config.resolved.json", json.dumps(resolved, indent=2, sort_keys=True))

    manifest = load_manifest(out)
    todo = [s for s in specs if not is_complete(out, manifest, s.trial_id)]
    log.info("%d trials, %d to run, parallelism %d", len(specs), len(todo), workers)

    def record(tid: str, status: str, error: str | None) -> None:
        entry = {"status": status}
        if error:
            entry["error"] = error
        manifest["trials"][tid] = entry
        _write_manifest(out, manifest)

    if workers <= 1:
        for s in todo:
            record(*_worker(asdict(s), str(out)))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_worker, asdict(s), str(out)) for s in todo]
            for fut in as_completed(futures):
                record(*fut.result())
    _write_manifest(out, manifest)
    return out
