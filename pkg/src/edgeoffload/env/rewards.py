"""Latency-shaped rewards credited when tasks finish.

Each completion pays C minus its response latency; each drop pays C
minus (deadline + drop penalty), which is strictly worse than any
on-time completion of the same task. Intervals where none of an agent's
tasks finish pay zero.
"""

from __future__ import annotations

import numpy as np

from ..config import RewardParams
from ..sim.metrics import finish_cost_s
from ..sim.tasks import FinishEvent


def step_reward(finishes: list[FinishEvent], ied: int,
                params: RewardParams) -> float:
    """Reward for one agent from one interval's finish events."""
    total = 0.0
    for ev in finishes:
        if ev.ied != ied:
            continue
        total += params.completion_bonus_s - finish_cost_s(ev, params.drop_penalty_s)
    return total


def interval_rewards(finishes: list[FinishEvent], num_ieds: int,
                     params: RewardParams) -> np.ndarray:
    out = np.zeros(num_ieds)
    for ev in finishes:
        out[ev.ied] += params.completion_bonus_s - finish_cost_s(
            ev, params.drop_penalty_s)
    return out


def discounted_return(rewards, gamma: float) -> float:
    total = 0.0
    factor = 1.0
    for r in rewards:
        total += factor * float(r)
        factor *= gamma
    return total
