"""Decision policies: fixed baselines and the learned actor wrapper.

Every policy implements reset(state) and act(agent, obs, has_task,
explore). act returns an action index (0 = stay local, m = offload to
edge server m-1) or None when the agent has no task this interval.
"""

from __future__ import annotations

import numpy as np

from ..config import ObsParams, SystemConfig
from ..env.observation import observation_dim
from ..env.rollout import ZeroHidden
from ..nn.sampling import sample_categorical
from ..seeds import child_rng
from ..sim.system import BITS_PER_MB
from .actor import ActorNet

BASELINE_TAGS = ("local-only", "random", "greedy", "round-robin")


class LocalOnlyPolicy:
    def reset(self, state) -> None:
        pass

    def act(self, agent: int, obs: np.ndarray, has_task: bool,
            explore: bool) -> int | None:
        return 0 if has_task else None


class RandomPolicy:
    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.num_actions = 1

    def reset(self, state) -> None:
        self.num_actions = state.config.num_ess + 1

    def act(self, agent: int, obs: np.ndarray, has_task: bool,
            explore: bool) -> int | None:
        if not has_task:
            return None
        return int(self.rng.integers(0, self.num_actions))


class RoundRobinPolicy:
    def __init__(self):
        self.counter = 0
        self.num_actions = 1

    def reset(self, state) -> None:
        self.counter = 0
        self.num_actions = state.config.num_ess + 1

    def act(self, agent: int, obs: np.ndarray, has_task: bool,
            explore: bool) -> int | None:
        if not has_task:
            return None
        a = self.counter % self.num_actions
        self.counter += 1
        return a


class GreedyPolicy:
    """Myopic latency minimizer from the agent's own observation.

    Local estimate: queued wait plus own service time. Offload estimate
    per server: transmit the backlog plus the task at a 1/I bandwidth
    share, then compute the backlog plus the task at the full server
    rate. Ties go to the lower action index.
    """

    def __init__(self, obs_params: ObsParams | None = None):
        self.obs = obs_params or ObsParams()
        self.cfg: SystemConfig | None = None
        self.ied_gpu = None
        self.es_gpu = None

    def reset(self, state) -> None:
        self.cfg = state.config
        self.ied_gpu = state.ied_gpu_hz.copy()
        self.es_gpu = state.es_gpu_hz.copy()

    def act(self, agent: int, obs: np.ndarray, has_task: bool,
            explore: bool) -> int | None:
        if not has_task:
            return None
        cfg = self.cfg
        m = cfg.num_ess
        size = obs[0] * (cfg.size_range_mb[1] - cfg.size_range_mb[0]) + cfg.size_range_mb[0]
        density = obs[1] * (cfg.density_range[1] - cfg.density_range[0]) + cfg.density_range[0]
        wait_local = obs[3] * cfg.deadline_range_s[1]
        comm_backlog = obs[4:4 + m] * self.obs.queue_cap_mb
        edge_backlog = obs[4 + m:4 + 2 * m] * self.obs.queue_cap_mb
        gains = obs[4 + 2 * m:4 + 3 * m] * self.obs.gain_cap
        work_gc = size * density
        estimates = np.empty(m + 1)
        estimates[0] = wait_local + work_gc * 1e9 / self.ied_gpu[agent]
        share = cfg.bandwidth_hz / cfg.num_ieds
        for j in range(m):
            rate = share * np.log2(1.0 + cfg.tx_power_w * gains[j] / cfg.noise_power)
            tx_s = (comm_backlog[j] + size) * BITS_PER_MB / max(rate, 1e-9)
            compute_s = (edge_backlog[j] + size) * density * 1e9 / self.es_gpu[j]
            estimates[j + 1] = tx_s + compute_s
        return int(np.argmin(estimates))


class ActorPolicy:
    """Wraps a trained actor network; owns its recurrent state.

    Exploration samples from the temperature-relaxed policy
    softmax(logits / temperature); evaluation takes the argmax.
    """

    def __init__(self, net: ActorNet, rng: np.random.Generator | None = None,
                 temperature: float = 1.0):
        self.net = net
        self.rng = rng or np.random.default_rng(0)
        self.temperature = float(temperature)
        self.h = net.initial_state(1)

    def reset(self, state) -> None:
        self.h = self.net.initial_state(1)

    def hidden(self, agent: int) -> np.ndarray:
        return self.h[0].copy()

    def act(self, agent: int, obs: np.ndarray, has_task: bool,
            explore: bool) -> int | None:
        logits, h_next, _ = self.net.forward(obs[None], self.h)
        self.h = h_next
        if not has_task:
            return None
        if explore:
            return int(sample_categorical(logits / self.temperature,
                                          self.rng)[0])
        return int(np.argmax(logits[0]))


def baseline_policies(tag: str, cfg: SystemConfig, seed: int,
                      obs_params: ObsParams | None = None) -> list:
    if tag == "local-only":
        return [LocalOnlyPolicy() for _ in range(cfg.num_ieds)]
    if tag == "random":
        return [RandomPolicy(child_rng(seed, "policy", i))
                for i in range(cfg.num_ieds)]
    if tag == "greedy":
        return [GreedyPolicy(obs_params) for _ in range(cfg.num_ieds)]
    if tag == "round-robin":
        return [RoundRobinPolicy() for _ in range(cfg.num_ieds)]
    raise ValueError(f"unknown baseline tag {tag!r}")


def zero_tracker_for(cfg: SystemConfig) -> ZeroHidden:
    return ZeroHidden()


def policy_obs_dim(cfg: SystemConfig) -> int:
    return observation_dim(cfg.num_ess)
