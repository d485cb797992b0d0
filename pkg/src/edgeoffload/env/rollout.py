"""Episode driver connecting per-agent policies to the simulator."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..config import ObsParams, RewardParams
from ..errors import ProtocolError
from ..sim.metrics import average_latency_s, completion_rate, objective_value
from ..sim.system import SystemState
from .actions import num_actions
from .observation import observe_all
from .rewards import interval_rewards


@dataclass
class Transition:
    """One joint step stored for off-policy training."""

    obs: np.ndarray          # (I, obs_dim)
    actions: np.ndarray      # (I, n_actions) one-hot, all-zero for no-ops
    rewards: np.ndarray      # (I,)
    next_obs: np.ndarray     # (I, obs_dim); zeros on the terminal step
    done: bool
    acted: np.ndarray        # (I,) bool, False where the agent had no task
    h_actor: np.ndarray      # (I, Ha) hidden carriers entering this interval
    h_critic: np.ndarray     # (I, Hc)
    next_h_actor: np.ndarray
    next_h_critic: np.ndarray


@dataclass
class EpisodeMetrics:
    reward_per_agent: np.ndarray
    mean_reward: float
    completion_rate: float
    avg_latency_s: float
    objective_s: float
    generated: int
    completed: int
    dropped: int
    in_flight_end: int
    zero_tasks: bool


@dataclass
class RolloutResult:
    metrics: EpisodeMetrics
    transitions: list[Transition] = field(default_factory=list)


class ZeroHidden:
    """Placeholder hidden-state tracker for memoryless policies."""

    def __init__(self, dim: int = 1):
        self.dim = dim
        self.h = None

    def reset(self, num_agents: int) -> None:
        self.h = np.zeros((num_agents, self.dim))

    def advance(self, obs: np.ndarray, acts: np.ndarray) -> None:
        pass


def rollout(state: SystemState, policies, intervals: int | None = None,
            explore: bool = False,
            reward_params: RewardParams | None = None,
            obs_params: ObsParams | None = None,
            collect: bool = False,
            hidden_tracker=None,
            trajectory_sink=None) -> RolloutResult:
    """Run one episode from a fresh system state.

    `policies` is one policy object per IED exposing reset/act (and
    hidden snapshots when transitions are collected). With a fixed seed
    and deterministic policies the trajectory is identical on every run.
    """
    cfg = state.config
    n_agents = cfg.num_ieds
    n_act = num_actions(cfg.num_ess)
    horizon = cfg.episode_intervals if intervals is None else int(intervals)
    rparams = reward_params or RewardParams()
    if len(policies) != n_agents:
        raise ProtocolError(f"need {n_agents} policies, got {len(policies)}")
    for policy in policies:
        policy.reset(state)
    tracker = hidden_tracker or ZeroHidden()
    tracker.reset(n_agents)

    transitions: list[Transition] = []
    reward_sums = np.zeros(n_agents)
    prev = None  # (obs, onehots, rewards, acted, h_a, h_c)

    def actor_hidden() -> np.ndarray:
        rows = []
        for i, policy in enumerate(policies):
            h = getattr(policy, "hidden", None)
            rows.append(h(i) if callable(h) else np.zeros(1))
        return np.stack(rows)

    for t in range(horizon):
        state.update_channel_gains(t)
        state.spawn_tasks(t)
        obs = observe_all(state, obs_params)
        if collect and prev is not None:
            p_obs, p_act, p_rew, p_acted, p_ha, p_hc = prev
            transitions.append(Transition(
                obs=p_obs, actions=p_act, rewards=p_rew, next_obs=obs,
                done=False, acted=p_acted, h_actor=p_ha, h_critic=p_hc,
                next_h_actor=actor_hidden(), next_h_critic=tracker.h.copy()))
        h_a = actor_hidden() if collect else None
        h_c = tracker.h.copy() if collect else None

        actions: list[int | None] = []
        onehots = np.zeros((n_agents, n_act))
        acted = np.zeros(n_agents, dtype=bool)
        for i in range(n_agents):
            has_task = i in state.pending
            a = policies[i].act(i, obs[i], has_task, explore)
            if has_task:
                if a is None or not 0 <= int(a) < n_act:
                    raise ProtocolError(
                        f"policy for IED {i} returned invalid action {a!r}")
                a = int(a)
                onehots[i, a] = 1.0
                acted[i] = True
                actions.append(a)
            else:
                actions.append(None)
        state.apply_actions(actions)
        state.step_comm_queues(t)
        state.step_edge_queues(t)
        state.step_local_queues(t)
        state.enforce_deadlines(t)
        rewards = interval_rewards(state.ledger.finishes_at(t), n_agents, rparams)
        reward_sums += rewards
        tracker.advance(obs, onehots)
        state.finalize_interval(t)

        if trajectory_sink is not None:
            for i in range(n_agents):
                trajectory_sink({
                    "t": t, "i": i,
                    "obs": [float(x) for x in obs[i]],
                    "action": actions[i],
                    "reward": float(rewards[i]),
                })
        if collect:
            prev = (obs, onehots, rewards, acted, h_a, h_c)

    if collect and prev is not None:
        p_obs, p_act, p_rew, p_acted, p_ha, p_hc = prev
        dim = p_obs.shape[1]
        transitions.append(Transition(
            obs=p_obs, actions=p_act, rewards=p_rew,
            next_obs=np.zeros((n_agents, dim)), done=True, acted=p_acted,
            h_actor=p_ha, h_critic=p_hc,
            next_h_actor=actor_hidden(), next_h_critic=tracker.h.copy()))

    ledger = state.ledger
    metrics = EpisodeMetrics(
        reward_per_agent=reward_sums,
        mean_reward=float(reward_sums.mean()),
        completion_rate=completion_rate(ledger),
        avg_latency_s=average_latency_s(ledger, rparams.drop_penalty_s),
        objective_s=objective_value(ledger, rparams.drop_penalty_s),
        generated=ledger.generated,
        completed=ledger.completed,
        dropped=ledger.dropped,
        in_flight_end=state.in_flight,
        zero_tasks=ledger.generated == 0,
    )
    return RolloutResult(metrics=metrics, transitions=transitions)


def dump_trajectory_jsonl(records: list[dict], path: str) -> None:
    """Newline-delimited self-describing trajectory records."""
    import json
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
