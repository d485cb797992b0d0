"""Figure rendering for run directories.

Reads the delimited outputs a run wrote and renders PNGs into
<run>/figures/. Uses the headless backend so it works anywhere.
"""

from __future__ import annotations

import csv
import os

import numpy as np


def _plt():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _load_csv(path: str) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _column(rows: list[dict], name: str) -> np.ndarray:
    vals = [row[name] for row in rows if row.get(name, "") != ""]
    return np.array([float(v) for v in vals])


def _rolling(x: np.ndarray, window: int = 25) -> np.ndarray:
    if len(x) < window:
        return x
    kernel = np.ones(window) / window
    return np.convolve(x, kernel, mode="valid")


def render_run_figures(run_dir: str) -> list[str]:
    path = os.path.join(run_dir, "episodes.csv")
    if not os.path.isfile(path):
        return []
    rows = _load_csv(path)
    if not rows:
        return []
    plt = _plt()
    fig_dir = os.path.join(run_dir, "figures")
    os.makedirs(fig_dir, exist_ok=True)
    episodes = _column(rows, "episode")
    written = []

    panels = [("mean_reward", "mean reward", "reward.png"),
              ("completion_rate", "completion rate", "completion.png"),
              ("avg_latency_s", "average latency (s)", "latency.png"),
              ("objective_s", "objective (s)", "objective.png")]
    for col, label, fname in panels:
        series = _column(rows, col)
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(episodes, series, alpha=0.35, lw=0.8, label="per episode")
        smooth = _rolling(series)
        if len(smooth) != len(series):
            ax.plot(episodes[len(episodes) - len(smooth):], smooth,
                    lw=1.8, label="rolling mean")
        ax.set_xlabel("episode")
        ax.set_ylabel(label)
        ax.legend(loc="best", fontsize=8)
        fig.tight_layout()
        out = os.path.join(fig_dir, fname)
        fig.savefig(out, dpi=120)
        plt.close(fig)
        written.append(out)

    losses = _column(rows, "critic_loss")
    if len(losses):
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(np.arange(len(losses)), losses, lw=0.8, label="critic")
        actor = _column(rows, "actor_loss")
        if len(actor):
            ax.plot(np.arange(len(actor)), actor, lw=0.8, label="actor")
        ax.set_xlabel("training episode (post-warmup)")
        ax.set_ylabel("loss")
        ax.set_yscale("symlog")
        ax.legend(loc="best", fontsize=8)
        fig.tight_layout()
        out = os.path.join(fig_dir, "losses.png")
        fig.savefig(out, dpi=120)
        plt.close(fig)
        written.append(out)
    return written


def render_sweep_figures(run_dir: str) -> list[str]:
    path = os.path.join(run_dir, "sweep_summary.csv")
    if not os.path.isfile(path):
        return []
    rows = _load_csv(path)
    if not rows:
        return []
    plt = _plt()
    fig_dir = os.path.join(run_dir, "figures")
    os.makedirs(fig_dir, exist_ok=True)
    axis = rows[0]["axis"]
    values = _column(rows, "value")
    written = []
    for metric, label in (("mean_reward", "mean reward"),
                          ("completion_rate", "completion rate"),
                          ("avg_latency_s", "average latency (s)"),
                          ("objective_s", "objective (s)")):
        mean = _column(rows, f"{metric}_mean")
        std = _column(rows, f"{metric}_std")
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.errorbar(values, mean, yerr=std, marker="o", capsize=3)
        ax.set_xlabel(axis)
        ax.set_ylabel(label)
        fig.tight_layout()
        out = os.path.join(fig_dir, f"sweep_{metric}.png")
        fig.savefig(out, dpi=120)
        plt.close(fig)
        written.append(out)
    return written


def render_report(run_dir: str) -> list[str]:
    if not os.path.isdir(run_dir):
        raise OSError(f"no run directory at {run_dir}")
    return render_run_figures(run_dir) + render_sweep_figures(run_dir)
