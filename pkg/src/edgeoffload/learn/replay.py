"""Fixed-capacity ring buffer of joint transitions, stored as flat arrays."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..env.rollout import Transition


@dataclass
class Batch:
    obs: np.ndarray           # (B, I, obs_dim)
    actions: np.ndarray       # (B, I, A)
    rewards: np.ndarray       # (B, I)
    next_obs: np.ndarray      # (B, I, obs_dim)
    done: np.ndarray          # (B,)
    acted: np.ndarray         # (B, I) bool
    h_actor: np.ndarray       # (B, I, Sa)
    h_critic: np.ndarray      # (B, I, Sc)
    next_h_actor: np.ndarray
    next_h_critic: np.ndarray


class ReplayBuffer:
    def __init__(self, capacity: int, num_agents: int, obs_dim: int,
                 num_actions: int, actor_state: int, critic_state: int):
        self.capacity = int(capacity)
        self.size = 0
        self.cursor = 0
        cap, i = self.capacity, num_agents
        self.obs = np.zeros((cap, i, obs_dim))
        self.actions = np.zeros((cap, i, num_actions))
        self.rewards = np.zeros((cap, i))
        self.next_obs = np.zeros((cap, i, obs_dim))
        self.done = np.zeros(cap, dtype=bool)
        self.acted = np.zeros((cap, i), dtype=bool)
        self.h_actor = np.zeros((cap, i, actor_state))
        self.h_critic = np.zeros((cap, i, critic_state))
        self.next_h_actor = np.zeros((cap, i, actor_state))
        self.next_h_critic = np.zeros((cap, i, critic_state))

    def __len__(self) -> int:
        return self.size

    def push(self, tr: Transition) -> None:
        k = self.cursor
        self.obs[k] = tr.obs
        self.actions[k] = tr.actions
        self.rewards[k] = tr.rewards
        self.next_obs[k] = tr.next_obs
        self.done[k] = tr.done
        self.acted[k] = tr.acted
        self.h_actor[k] = tr.h_actor
        self.h_critic[k] = tr.h_critic
        self.next_h_actor[k] = tr.next_h_actor
        self.next_h_critic[k] = tr.next_h_critic
        self.cursor = (k + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def extend(self, transitions) -> None:
        for tr in transitions:
            self.push(tr)

    def sample(self, rng: np.random.Generator, batch_size: int) -> Batch:
        idx = rng.integers(0, self.size, size=batch_size)
        return Batch(
            obs=self.obs[idx], actions=self.actions[idx],
            rewards=self.rewards[idx], next_obs=self.next_obs[idx],
            done=self.done[idx], acted=self.acted[idx],
            h_actor=self.h_actor[idx], h_critic=self.h_critic[idx],
            next_h_actor=self.next_h_actor[idx],
            next_h_critic=self.next_h_critic[idx])
