"""Experiment harness: configs, trial matrices, summaries, plots, diagnostics."""

from .config import ExperimentConfig, load_config, parse_config, preset
from .diagnose import diagnose
from .experiment import run_experiment
from .plots import export_plots
from .summary import summarize

__all__ = [
    "ExperimentConfig",
    "diagnose",
    "export_plots",
    "load_config",
    "parse_config",
    "preset",
    "run_experiment",
    "summarize",
]
