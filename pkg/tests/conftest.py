"""Shared fixtures: desk-scale trainings are expensive, so their summaries
are cached in pytest's cache keyed by a digest of the package source.
Delete .pytest_cache (or edit any source file) to force retraining.
"""

from __future__ import annotations

import hashlib
import sys
import time
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).resolve().parent
if str(TESTS_DIR) not in sys.path:
    sys.path.insert(0, str(TESTS_DIR))

from edgeoffload.config import apply_sweep_point, desk_config
from edgeoffload.env.rollout import rollout
from edgeoffload.learn.policies import baseline_policies
from edgeoffload.learn.trainer import Learner
from edgeoffload.seeds import child_seed
from edgeoffload.sim.system import new_system

DESK_SEEDS = (0, 1, 2, 3, 4)
FINAL_WINDOW = 100
EVAL_EPISODES = 10


def _source_digest() -> str:
    root = Path(__file__).resolve().parents[1] / "src" / "edgeoffload"
    h = hashlib.sha256()
    for path in sorted(root.rglob("*.py")):
        h.update(path.name.encode())
        h.update(path.read_bytes())
    return h.hexdigest()[:16]


def _baseline_window_reward(cfg, tag: str, episodes) -> float:
    """Mean reward of a fixed policy on the given training env seeds."""
    total = 0.0
    for ep in episodes:
        env = new_system(cfg.system, child_seed(cfg.train.seed, "env", ep))
        pols = baseline_policies(tag, cfg.system, child_seed(cfg.train.seed, "bl", ep),
                                 cfg.observe)
        res = rollout(env, pols, explore=False, reward_params=cfg.reward,
                      obs_params=cfg.observe)
        total += res.metrics.mean_reward
    return total / len(episodes)


def _eval_completion(cfg, policies_fn, env_tag: str) -> float:
    total = 0.0
    for k in range(EVAL_EPISODES):
        env = new_system(cfg.system, child_seed(cfg.system.seed, env_tag, k))
        res = rollout(env, policies_fn(env), explore=False,
                      reward_params=cfg.reward, obs_params=cfg.observe)
        total += res.metrics.completion_rate
    return total / EVAL_EPISODES


def _train_one(cfg) -> dict:
    learner = Learner(cfg.system, cfg.train, cfg.reward, cfg.observe)
    t0 = time.time()
    rows = learner.train()
    wall = time.time() - t0
    rewards = [row.metrics.mean_reward for row in rows]
    completions = [row.metrics.completion_rate for row in rows]
    last = slice(-FINAL_WINDOW, None)
    window_eps = range(len(rows) - FINAL_WINDOW, len(rows))
    summary = {
        "wall_s": wall,
        "first_window_reward": sum(rewards[:FINAL_WINDOW]) / FINAL_WINDOW,
        "final_window_reward": sum(rewards[last]) / FINAL_WINDOW,
        "final_window_completion": sum(completions[last]) / FINAL_WINDOW,
        "random_window_reward": _baseline_window_reward(cfg, "random", window_eps),
        "local_window_reward": _baseline_window_reward(cfg, "local-only", window_eps),
        "eval_completion": _eval_completion(
            cfg, lambda env: learner.greedy_policies(), "accept-eval"),
        "greedy_eval_completion": _eval_completion(
            cfg, lambda env: baseline_policies(
                "greedy", cfg.system, child_seed(cfg.system.seed, "accept-greedy"),
                cfg.observe),
            "accept-eval"),
    }
    return summary


def _run_group(group: str, seed: int) -> dict:
    cfg = desk_config(seed=seed)
    if group == "ablation":
        import dataclasses
        cfg.train = dataclasses.replace(cfg.train, use_attention=False)
    elif group == "deadline10":
        cfg = apply_sweep_point(cfg, "deadline", 1.0)
    elif group != "default":
        raise ValueError(group)
    return _train_one(cfg)


@pytest.fixture(scope="session")
def desk_trainings(request) -> dict:
    """Summaries of the 15 desk-scale trainings the acceptance gate needs.

    Three groups of five seeds: the default learner, the no-attention
    ablation, and the max-deadline-1.0 variant. Keyed by source digest.
    """
    key = f"edgeoffload/trainings/{_source_digest()}"
    cached = request.config.cache.get(key, None)
    if cached is not None:
        return cached
    results: dict[str, dict] = {}
    for group in ("default", "ablation", "deadline10"):
        for seed in DESK_SEEDS:
            results[f"{group}/{seed}"] = _run_group(group, seed)
    request.config.cache.set(key, results)
    return results
