"""Experiment harness: run drivers, gradient suite, figures, CLI."""

from .experiment import (EPISODE_COLUMNS, SWEEP_COLUMNS,
                         SWEEP_SUMMARY_COLUMNS, RunSummary,
                         evaluation_metrics, resolve_out_dir, run_evaluation,
                         run_simulation, run_sweep, run_training)
from .figures import render_report, render_run_figures, render_sweep_figures
from .gradsuite import CASES, gradient_suite, run_case

__all__ = [
    "EPISODE_COLUMNS", "SWEEP_COLUMNS", "SWEEP_SUMMARY_COLUMNS",
    "RunSummary", "evaluation_metrics", "resolve_out_dir", "run_evaluation",
    "run_simulation", "run_sweep", "run_training", "render_report",
    "render_run_figures", "render_sweep_figures", "CASES", "gradient_suite",
    "run_case",
]
