"""Off-policy training loop for the attention-critic learner.

Each episode runs one exploratory rollout into the replay buffer, then a
fixed number of gradient updates. Targets are computed from slowly
tracking target networks with smoothed, temperature-relaxed next
actions. Per-episode randomness derives from (seed, episode), so a
resumed run replays the same episode stream as an uninterrupted one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import ObsParams, RewardParams, SystemConfig, TrainConfig
from ..env.observation import observation_dim
from ..env.rollout import EpisodeMetrics, rollout
from ..errors import NumericalError
from ..nn.checkpoint import load_stores, save_stores
from ..nn.ops import log_softmax, log_softmax_backward, softmax
from ..nn.sampling import gumbel_softmax, gumbel_softmax_backward
from ..nn.store import ParamStore
from ..seeds import child_rng, child_seed
from ..sim.system import new_system
from .actor import ActorNet
from .critic import AttentiveCritic
from .policies import ActorPolicy
from .replay import Batch, ReplayBuffer

_DIVERGENCE_STREAK = 50


@dataclass
class TrainEpisode:
    episode: int
    metrics: EpisodeMetrics
    critic_loss: float | None
    actor_loss: float | None
    temperature: float


class CriticHiddenTracker:
    """Advances the critic's recurrent state alongside a rollout."""

    def __init__(self, critic: AttentiveCritic):
        self.critic = critic
        self.h = None

    def reset(self, num_agents: int) -> None:
        self.h = np.zeros((num_agents, self.critic.state_dim))

    def advance(self, obs: np.ndarray, acts: np.ndarray) -> None:
        self.h = self.critic.advance_hidden(obs[None], acts[None],
                                            self.h[None])[0]


def soft_update(target: ParamStore, online: ParamStore, tau: float) -> None:
    for name in target.names():
        t = target.values[name]
        t *= (1.0 - tau)
        t += tau * online.values[name]


def compute_targets(batch: Batch, target_actors: list[ActorNet],
                    target_critic: AttentiveCritic, gamma: float,
                    entropy_weight: float, smoothing_std: float,
                    temperature: float, rng: np.random.Generator) -> np.ndarray:
    """Bootstrapped targets y (B, I), built from target networks only.

    Next actions are relaxed: softmax((logits + noise) / temperature)
    with the noise clipped to two standard deviations. Terminal rows
    take the bare reward.
    """
    bsz, n_agents = batch.rewards.shape
    next_actions = np.zeros((bsz, n_agents, target_actors[0].num_actions))
    log_probs = np.zeros((bsz, n_agents))
    for i in range(n_agents):
        logits, _, _ = target_actors[i].forward(batch.next_obs[:, i],
                                                batch.next_h_actor[:, i])
        noise = rng.standard_normal(logits.shape) * smoothing_std
        bound = 2.0 * smoothing_std
        noise = np.clip(noise, -bound, bound)
        relaxed = softmax((logits + noise) / temperature)
        next_actions[:, i] = relaxed
        log_probs[:, i] = (relaxed * log_softmax(logits)).sum(axis=1)
    q_next, _, _ = target_critic.forward(batch.next_obs, next_actions,
                                         batch.next_h_critic)
    cont = (~batch.done).astype(float)[:, None]
    return batch.rewards + gamma * cont * (q_next - entropy_weight * log_probs)


class Learner:
    def __init__(self, system_cfg: SystemConfig, train_cfg: TrainConfig,
                 reward_params: RewardParams | None = None,
                 obs_params: ObsParams | None = None):
        system_cfg.validate()
        train_cfg.validate()
        self.sc = system_cfg
        self.tc = train_cfg
        self.reward_params = reward_params or RewardParams()
        self.obs_params = obs_params or ObsParams()
        self.obs_dim = observation_dim(system_cfg.num_ess)
        self.num_actions = system_cfg.num_ess + 1
        self.num_agents = system_cfg.num_ieds
        seed = train_cfg.seed
        self.actors = [
            ActorNet(self.obs_dim, self.num_actions,
                     hidden=train_cfg.hidden_actor,
                     state_dim=train_cfg.hidden_state,
                     dropout_rate=train_cfg.dropout,
                     seed=child_seed(seed, "actor", i))
            for i in range(self.num_agents)]
        self.critic = AttentiveCritic(
            self.obs_dim, self.num_actions, self.num_agents,
            model_dim=train_cfg.model_dim, attn_heads=train_cfg.attn_heads,
            state_dim=train_cfg.hidden_state,
            head_hidden=train_cfg.head_hidden,
            dropout_rate=train_cfg.dropout,
            use_attention=train_cfg.use_attention,
            seed=child_seed(seed, "critic"))
        self.target_actors = [self._clone_actor(a) for a in self.actors]
        self.target_critic = self._clone_critic(self.critic)
        self.buffer = ReplayBuffer(
            train_cfg.buffer_capacity, self.num_agents, self.obs_dim,
            self.num_actions, train_cfg.hidden_state, train_cfg.hidden_state)
        self.updates_done = 0
        self._high_loss_streak = 0

    def _clone_actor(self, actor: ActorNet) -> ActorNet:
        twin = ActorNet(actor.obs_dim, actor.num_actions, hidden=actor.hidden,
                        state_dim=actor.state_dim,
                        dropout_rate=actor.dropout_rate,
                        seed=actor.params.seed)
        twin.params = actor.params.copy()
        return twin

    def _clone_critic(self, critic: AttentiveCritic) -> AttentiveCritic:
        twin = AttentiveCritic(
            critic.obs_dim, critic.num_actions, critic.num_agents,
            model_dim=critic.model_dim, attn_heads=critic.attn.num_heads,
            state_dim=critic.state_dim,
            head_hidden=self.tc.head_hidden,
            dropout_rate=critic.dropout_rate,
            use_attention=critic.use_attention, seed=critic.params.seed)
        twin.params = critic.params.copy()
        return twin

    # -- schedule --------------------------------------------------------

    def temperature(self, episode: int) -> float:
        total = max(self.tc.episodes - 1, 1)
        frac = min(episode, total) / total
        return self.tc.gumbel_temp_start + frac * (
            self.tc.gumbel_temp_end - self.tc.gumbel_temp_start)

    def entropy_weight(self, episode: int) -> float:
        """Entropy bonus annealed on the same linear clock as temperature.

        High early to keep exploration broad, low late so the policy can
        commit instead of hovering near uniform."""
        total = max(self.tc.episodes - 1, 1)
        frac = min(episode, total) / total
        return self.tc.entropy_weight + frac * (
            self.tc.entropy_weight_end - self.tc.entropy_weight)

    # -- updates ---------------------------------------------------------

    def critic_update(self, batch: Batch, temperature: float,
                      rng: np.random.Generator,
                      entropy_weight: float | None = None) -> float:
        lam = self.tc.entropy_weight if entropy_weight is None else entropy_weight
        y = compute_targets(batch, self.target_actors, self.target_critic,
                            self.tc.gamma, lam,
                            self.tc.smoothing_std, temperature, rng)
        q, _, cache = self.critic.forward(batch.obs, batch.actions,
                                          batch.h_critic, training=True,
                                          rng=rng)
        diff = q - y
        loss = float((diff ** 2).mean(axis=0).sum())
        self.critic.backward(cache, 2.0 * diff / diff.shape[0])
        if self.tc.grad_clip > 0:
            self.critic.params.clip_grad_norm(self.tc.grad_clip)
        self.critic.params.adam_step(self.tc.lr_critic)
        return loss

    def actor_update(self, batch: Batch, temperature: float,
                     rng: np.random.Generator,
                     entropy_weight: float | None = None) -> float:
        """One policy-gradient step per agent through a single critic pass.

        Every agent's fresh relaxed sample is substituted into its own
        copy of the stored joint action; the copies are stacked along
        the batch axis so the critic runs once. Agents that held no task
        in a given transition are masked out of that row.
        """
        bsz = batch.obs.shape[0]
        n = self.num_agents
        lam = self.tc.entropy_weight if entropy_weight is None else entropy_weight
        big_act = np.tile(batch.actions, (n, 1, 1))
        caches, samples, sample_caches, lsms = [], [], [], []
        for i in range(n):
            logits, _, cache = self.actors[i].forward(
                batch.obs[:, i], batch.h_actor[:, i], training=True, rng=rng)
            sample, s_cache = gumbel_softmax(logits, temperature, rng)
            big_act[i * bsz:(i + 1) * bsz, i, :] = sample
            caches.append(cache)
            samples.append(sample)
            sample_caches.append(s_cache)
            lsms.append(log_softmax(logits))
        big_obs = np.tile(batch.obs, (n, 1, 1))
        big_h = np.tile(batch.h_critic, (n, 1, 1))
        qs, _, c_cache = self.critic.forward(big_obs, big_act, big_h)
        dqs = np.zeros_like(qs)
        total_loss = 0.0
        counts = np.zeros(n)
        for i in range(n):
            m = batch.acted[:, i].astype(float)
            counts[i] = max(m.sum(), 1.0)
            q_i = qs[i * bsz:(i + 1) * bsz, i]
            logp_i = (samples[i] * lsms[i]).sum(axis=1)
            total_loss += float((m * (lam * logp_i - q_i)).sum() / counts[i])
            dqs[i * bsz:(i + 1) * bsz, i] = -m / counts[i]
        dactions = self.critic.backward(c_cache, dqs)
        # only d(actions) is wanted from that pass
        self.critic.params.zero_grads()
        for i in range(n):
            m = batch.acted[:, i].astype(float)
            coef = (lam * m / counts[i])[:, None]
            da = dactions[i * bsz:(i + 1) * bsz, i, :] + coef * lsms[i]
            dlogits = gumbel_softmax_backward(sample_caches[i], da)
            dlogits += log_softmax_backward(lsms[i], coef * samples[i])
            self.actors[i].backward(caches[i], dlogits)
            if self.tc.grad_clip > 0:
                self.actors[i].params.clip_grad_norm(self.tc.grad_clip)
            self.actors[i].params.adam_step(self.tc.lr_actor)
        return total_loss

    def _soft_updates(self) -> None:
        tau = self.tc.polyak
        soft_update(self.target_critic.params, self.critic.params, tau)
        for online, target in zip(self.actors, self.target_actors):
            soft_update(target.params, online.params, tau)

    def _guard(self, loss: float) -> None:
        if not np.isfinite(loss):
            raise NumericalError(f"critic loss diverged to {loss}")
        if loss > self.tc.loss_ceiling:
            self._high_loss_streak += 1
            if self._high_loss_streak >= _DIVERGENCE_STREAK:
                raise NumericalError(
                    f"critic loss stayed above {self.tc.loss_ceiling} for "
                    f"{self._high_loss_streak} consecutive updates")
        else:
            self._high_loss_streak = 0

    # -- episodes ----------------------------------------------------------

    def run_episode(self, episode: int) -> TrainEpisode:
        temp = self.temperature(episode)
        env = new_system(self.sc, child_seed(self.tc.seed, "env", episode))
        pols = [ActorPolicy(net, child_rng(self.tc.seed, "explore", episode, i),
                            temperature=temp)
                for i, net in enumerate(self.actors)]
        tracker = CriticHiddenTracker(self.critic)
        result = rollout(env, pols, explore=True,
                         reward_params=self.reward_params,
                         obs_params=self.obs_params, collect=True,
                         hidden_tracker=tracker)
        self.buffer.extend(result.transitions)
        critic_losses: list[float] = []
        actor_losses: list[float] = []
        if len(self.buffer) >= self.tc.warmup_transitions:
            rng = child_rng(self.tc.seed, "update", episode)
            lam = self.entropy_weight(episode)
            for k in range(self.tc.updates_per_episode):
                batch = self.buffer.sample(rng, self.tc.batch_size)
                closs = self.critic_update(batch, temp, rng, lam)
                self._guard(closs)
                critic_losses.append(closs)
                self.updates_done += 1
                # delayed policy and target updates
                if self.updates_done % self.tc.actor_delay == 0:
                    actor_losses.append(self.actor_update(batch, temp, rng, lam))
                    self._soft_updates()
        return TrainEpisode(
            episode=episode, metrics=result.metrics,
            critic_loss=float(np.mean(critic_losses)) if critic_losses else None,
            actor_loss=float(np.mean(actor_losses)) if actor_losses else None,
            temperature=temp)

    def train(self, episodes: int | None = None, start_episode: int = 0,
              on_episode=None) -> list[TrainEpisode]:
        total = self.tc.episodes if episodes is None else int(episodes)
        rows = []
        for ep in range(start_episode, total):
            row = self.run_episode(ep)
            rows.append(row)
            if on_episode is not None:
                on_episode(row)
        return rows

    # -- inference ---------------------------------------------------------

    def greedy_policies(self) -> list[ActorPolicy]:
        """Argmax policies on the online actors; the critic is not used."""
        return [ActorPolicy(net) for net in self.actors]

    def evaluate(self, env_seed: int, episodes: int = 1) -> list[EpisodeMetrics]:
        out = []
        for k in range(episodes):
            env = new_system(self.sc, child_seed(env_seed, "eval", k))
            result = rollout(env, self.greedy_policies(), explore=False,
                             reward_params=self.reward_params,
                             obs_params=self.obs_params)
            out.append(result.metrics)
        return out

    # -- persistence ---------------------------------------------------------

    def _stores(self) -> dict[str, ParamStore]:
        stores = {"critic": self.critic.params,
                  "critic_target": self.target_critic.params}
        for i in range(self.num_agents):
            stores[f"actor{i}"] = self.actors[i].params
            stores[f"actor_target{i}"] = self.target_actors[i].params
        return stores

    def save(self, directory: str, episode: int) -> None:
        meta = {"episode": str(episode),
                "agents": str(self.num_agents),
                "updates": str(self.updates_done)}
        save_stores(directory, self._stores(), meta)

    def restore(self, directory: str) -> int:
        """Loads weights and moments; returns the next episode index."""
        meta = load_stores(directory, self._stores())
        self.updates_done = int(meta.get("updates", "0"))
        return int(meta.get("episode", "0"))
