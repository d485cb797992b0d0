"""Experiment drivers shared by the command line and the tests.

Every run writes delimited per-episode records plus a config echo into
its output directory. Wall-clock timing goes only into summary.txt so
repeated runs with the same seed produce byte-identical data files.
"""

from __future__ import annotations

import csv
import dataclasses
import os
import time
from dataclasses import dataclass, field

import numpy as np

from ..config import (ExperimentConfig, TrainConfig, apply_sweep_point,
                      write_config)
from ..env.rollout import EpisodeMetrics, rollout
from ..errors import ConfigError
from ..learn.policies import BASELINE_TAGS, baseline_policies
from ..learn.trainer import Learner, TrainEpisode
from ..seeds import child_seed
from ..sim.system import new_system

EPISODE_COLUMNS = ("episode", "mean_reward", "completion_rate",
                   "avg_latency_s", "objective_s", "drops",
                   "critic_loss", "actor_loss")
SWEEP_COLUMNS = ("axis", "value", "seed", "mean_reward", "completion_rate",
                 "avg_latency_s", "objective_s", "drops")
SWEEP_SUMMARY_COLUMNS = ("axis", "value", "seeds",
                         "mean_reward_mean", "mean_reward_std",
                         "completion_rate_mean", "completion_rate_std",
                         "avg_latency_s_mean", "avg_latency_s_std",
                         "objective_s_mean", "objective_s_std")
OUT_ROOT_ENV = "EDGEOFFLOAD_OUT_ROOT"


@dataclass
class RunSummary:
    command: str
    out_dir: str
    rows: int
    wall_s: float
    extra: dict = field(default_factory=dict)


def resolve_out_dir(out: str | None, default: str) -> str:
    path = out or default
    root = os.environ.get(OUT_ROOT_ENV)
    if root and not os.path.isabs(path):
        path = os.path.join(root, path)
    os.makedirs(path, exist_ok=True)
    return path


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.12g" % float(value)
    return str(value)


def write_rows(path: str, columns, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(row.get(col)) for col in columns])


def write_summary(path: str, summary: RunSummary) -> None:
    lines = [f"command {summary.command}",
             f"out {summary.out_dir}",
             f"rows {summary.rows}",
             f"wall_s {summary.wall_s:.3f}"]
    for key in sorted(summary.extra):
        lines.append(f"{key} {summary.extra[key]}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def metrics_row(episode: int, metrics: EpisodeMetrics,
                critic_loss: float | None = None,
                actor_loss: float | None = None) -> dict:
    return {
        "episode": episode,
        "mean_reward": metrics.mean_reward,
        "completion_rate": metrics.completion_rate,
        "avg_latency_s": metrics.avg_latency_s,
        "objective_s": metrics.objective_s,
        "drops": metrics.dropped,
        "critic_loss": critic_loss,
        "actor_loss": actor_loss,
    }


def effective_train(cfg: ExperimentConfig) -> TrainConfig:
    """The ablation tag forces the critic's attention block off."""
    if cfg.policy == "amarl-noattn" and cfg.train.use_attention:
        return dataclasses.replace(cfg.train, use_attention=False)
    return cfg.train


def _require_learned(cfg: ExperimentConfig) -> None:
    if cfg.policy not in ("amarl", "amarl-noattn"):
        raise ConfigError(
            f"policy '{cfg.policy}' is not a learned policy; use one of "
            f"amarl, amarl-noattn")


def run_training(cfg: ExperimentConfig, out: str | None = None,
                 episodes: int | None = None,
                 resume: str | None = None) -> RunSummary:
    cfg.validate()
    _require_learned(cfg)
    out_dir = resolve_out_dir(out, os.path.join(cfg.out_dir, "train"))
    write_config(cfg, os.path.join(out_dir, "config.ini"))
    learner = Learner(cfg.system, effective_train(cfg), cfg.reward, cfg.observe)
    start = 0
    if resume:
        start = learner.restore(resume)
    total = cfg.train.episodes if episodes is None else int(episodes)
    ckpt_dir = os.path.join(out_dir, "checkpoint")
    every = cfg.train.checkpoint_every
    rows: list[dict] = []
    t0 = time.perf_counter()
    csv_path = os.path.join(out_dir, "episodes.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(EPISODE_COLUMNS)
        for ep in range(start, total):
            row = learner.run_episode(ep)
            rec = metrics_row(ep, row.metrics, row.critic_loss, row.actor_loss)
            rows.append(rec)
            writer.writerow([format_cell(rec[c]) for c in EPISODE_COLUMNS])
            fh.flush()
            if every > 0 and (ep + 1) % every == 0:
                learner.save(ckpt_dir, ep + 1)
    learner.save(ckpt_dir, total)
    wall = time.perf_counter() - t0
    summary = RunSummary("train", out_dir, len(rows), wall,
                         {"episodes": str(total), "policy": cfg.policy,
                          "checkpoint": ckpt_dir})
    write_summary(os.path.join(out_dir, "summary.txt"), summary)
    return summary


def _fixed_policy_episodes(cfg: ExperimentConfig, tag: str, episodes: int,
                           seed_label: str) -> list[EpisodeMetrics]:
    out = []
    for k in range(episodes):
        env = new_system(cfg.system, child_seed(cfg.system.seed, seed_label, k))
        pols = baseline_policies(
            tag, cfg.system, child_seed(cfg.system.seed, seed_label, k, "pol"),
            obs_params=cfg.observe)
        result = rollout(env, pols, explore=False,
                         reward_params=cfg.reward, obs_params=cfg.observe)
        out.append(result.metrics)
    return out


def run_simulation(cfg: ExperimentConfig, out: str | None = None,
                   episodes: int | None = None) -> RunSummary:
    cfg.validate()
    if cfg.policy not in BASELINE_TAGS:
        raise ConfigError(
            f"simulate drives fixed policies {BASELINE_TAGS}; train and "
            f"evaluate handle '{cfg.policy}'")
    out_dir = resolve_out_dir(out, os.path.join(cfg.out_dir, "simulate"))
    write_config(cfg, os.path.join(out_dir, "config.ini"))
    n = cfg.sim_episodes if episodes is None else int(episodes)
    t0 = time.perf_counter()
    metrics = _fixed_policy_episodes(cfg, cfg.policy, n, "sim")
    rows = [metrics_row(k, m) for k, m in enumerate(metrics)]
    write_rows(os.path.join(out_dir, "episodes.csv"), EPISODE_COLUMNS, rows)
    wall = time.perf_counter() - t0
    summary = RunSummary("simulate", out_dir, len(rows), wall,
                         {"policy": cfg.policy, "episodes": str(n)})
    write_summary(os.path.join(out_dir, "summary.txt"), summary)
    return summary


def evaluation_metrics(cfg: ExperimentConfig, checkpoint: str | None,
                       episodes: int) -> list[EpisodeMetrics]:
    """Argmax rollouts for learned tags, plain rollouts for baselines.

    Environment seeds derive from the same (seed, "eval", k) path for
    every policy, so different policies face identical episode draws.
    """
    if cfg.policy in BASELINE_TAGS:
        return _fixed_policy_episodes(cfg, cfg.policy, episodes, "eval")
    _require_learned(cfg)
    if not checkpoint:
        raise ConfigError("evaluating a learned policy needs --checkpoint")
    learner = Learner(cfg.system, effective_train(cfg), cfg.reward, cfg.observe)
    learner.restore(checkpoint)
    out = []
    for k in range(episodes):
        env = new_system(cfg.system, child_seed(cfg.system.seed, "eval", k))
        result = rollout(env, learner.greedy_policies(), explore=False,
                         reward_params=cfg.reward, obs_params=cfg.observe)
        out.append(result.metrics)
    return out


def run_evaluation(cfg: ExperimentConfig, out: str | None = None,
                   checkpoint: str | None = None,
                   episodes: int | None = None) -> RunSummary:
    cfg.validate()
    out_dir = resolve_out_dir(out, os.path.join(cfg.out_dir, "evaluate"))
    write_config(cfg, os.path.join(out_dir, "config.ini"))
    n = cfg.eval_episodes if episodes is None else int(episodes)
    t0 = time.perf_counter()
    metrics = evaluation_metrics(cfg, checkpoint, n)
    rows = [metrics_row(k, m) for k, m in enumerate(metrics)]
    write_rows(os.path.join(out_dir, "episodes.csv"), EPISODE_COLUMNS, rows)
    wall = time.perf_counter() - t0
    summary = RunSummary("evaluate", out_dir, len(rows), wall,
                         {"policy": cfg.policy, "episodes": str(n)})
    write_summary(os.path.join(out_dir, "summary.txt"), summary)
    return summary


def run_sweep(cfg: ExperimentConfig, out: str | None = None,
              episodes: int | None = None) -> RunSummary:
    cfg.validate()
    if cfg.policy not in BASELINE_TAGS:
        raise ConfigError(
            "sweep drives fixed policies; train and evaluate learned ones "
            "point by point")
    out_dir = resolve_out_dir(out, os.path.join(cfg.out_dir, "sweep"))
    write_config(cfg, os.path.join(out_dir, "config.ini"))
    n = cfg.sim_episodes if episodes is None else int(episodes)
    spec = cfg.sweep
    point_rows: list[dict] = []
    summary_rows: list[dict] = []
    t0 = time.perf_counter()
    for value in spec.values:
        cfg_v = apply_sweep_point(cfg, spec.axis, value)
        per_seed = {"mean_reward": [], "completion_rate": [],
                    "avg_latency_s": [], "objective_s": []}
        for seed in spec.seeds:
            cfg_s = dataclasses.replace(
                cfg_v, system=dataclasses.replace(cfg_v.system, seed=int(seed)))
            metrics = _fixed_policy_episodes(cfg_s, cfg.policy, n, "sweep")
            means = {
                "mean_reward": float(np.mean([m.mean_reward for m in metrics])),
                "completion_rate": float(np.mean([m.completion_rate for m in metrics])),
                "avg_latency_s": float(np.mean([m.avg_latency_s for m in metrics])),
                "objective_s": float(np.mean([m.objective_s for m in metrics])),
            }
            point_rows.append({
                "axis": spec.axis, "value": value, "seed": int(seed),
                "drops": int(np.sum([m.dropped for m in metrics])), **means})
            for key, val in means.items():
                per_seed[key].append(val)
        row = {"axis": spec.axis, "value": value, "seeds": len(spec.seeds)}
        for key, vals in per_seed.items():
            row[f"{key}_mean"] = float(np.mean(vals))
            row[f"{key}_std"] = float(np.std(vals))
        summary_rows.append(row)
        # flush after every point so partial sweeps are inspectable
        write_rows(os.path.join(out_dir, "sweep.csv"), SWEEP_COLUMNS, point_rows)
        write_rows(os.path.join(out_dir, "sweep_summary.csv"),
                   SWEEP_SUMMARY_COLUMNS, summary_rows)
    wall = time.perf_counter() - t0
    summary = RunSummary("sweep", out_dir, len(point_rows), wall,
                         {"axis": spec.axis, "policy": cfg.policy,
                          "episodes_per_point": str(n)})
    write_summary(os.path.join(out_dir, "summary.txt"), summary)
    return summary
