"""Agent-facing interface: observations, actions, rewards, rollouts."""

from .actions import decode_onehot, encode_onehot, num_actions
from .observation import build_observation, observation_dim, observe_all
from .rewards import discounted_return, interval_rewards, step_reward
from .rollout import (EpisodeMetrics, RolloutResult, Transition, ZeroHidden,
                      dump_trajectory_jsonl, rollout)

__all__ = [
    "EpisodeMetrics", "RolloutResult", "Transition", "ZeroHidden",
    "build_observation", "decode_onehot", "discounted_return",
    "dump_trajectory_jsonl", "encode_onehot", "interval_rewards",
    "num_actions", "observation_dim", "observe_all", "rollout", "step_reward",
]
