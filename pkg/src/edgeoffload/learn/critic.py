"""Centralized action-value network with attention across agents.

Every agent's observation/action pair is encoded with shared weights and
a gated recurrent state, then each agent attends over the other agents'
encodings (the diagonal is masked) to form a coordination context. A
dueling head scores the agent's own action:

    Q_i = V_i + adv_i . a_i - mean(adv_i)

With attention disabled the context is a zero vector and no attention
parameters are registered; the remaining layers share names, so both
variants start from identical weights for a given seed.
"""

from __future__ import annotations

import numpy as np

from ..nn.attention import (AttentionSpec, attention_backward,
                            attention_forward, register_attention)
from ..nn.ops import (dense, dense_backward, dropout, dropout_backward, relu,
                      relu_backward, sigmoid, sigmoid_backward, tanh,
                      tanh_backward)
from ..nn.store import ParamStore


class AttentiveCritic:
    def __init__(self, obs_dim: int, num_actions: int, num_agents: int,
                 model_dim: int = 64, attn_heads: int = 4, state_dim: int = 16,
                 head_hidden: int = 64, dropout_rate: float = 0.1,
                 use_attention: bool = True, seed: int = 0):
        self.obs_dim = obs_dim
        self.num_actions = num_actions
        self.num_agents = num_agents
        self.model_dim = model_dim
        self.state_dim = state_dim
        self.dropout_rate = dropout_rate
        self.use_attention = use_attention
        self.params = ParamStore(seed=seed)
        p = self.params
        p.add_dense("enc.u", obs_dim + num_actions, model_dim)
        p.add_dense("gate.z", model_dim + state_dim, state_dim)
        p.add_dense("gate.c", model_dim + state_dim, state_dim)
        p.add_dense("emb.e", model_dim + state_dim, model_dim)
        self.attn = AttentionSpec("attn", attn_heads, model_dim)
        if use_attention:
            register_attention(p, self.attn)
        p.add_dense("head.p", 2 * model_dim, head_hidden)
        p.add_dense("head.v", head_hidden, 1)
        p.add_dense("head.adv", head_hidden, num_actions)
        # everyone attends to everyone else, never to themselves
        self.mask = ~np.eye(num_agents, dtype=bool)

    def initial_state(self, batch: int) -> np.ndarray:
        return np.zeros((batch, self.num_agents, self.state_dim))

    def _encode(self, obs: np.ndarray, actions: np.ndarray, h: np.ndarray):
        b, i, _ = obs.shape
        x = np.concatenate([obs, actions], axis=2).reshape(b * i, -1)
        h_flat = h.reshape(b * i, self.state_dim)
        u_pre = dense(self.params, "enc.u", x)
        u = relu(u_pre)
        zin = np.concatenate([u, h_flat], axis=1)
        z = sigmoid(dense(self.params, "gate.z", zin))
        c = tanh(dense(self.params, "gate.c", zin))
        h_next = (1.0 - z) * h_flat + z * c
        return x, h_flat, u_pre, u, zin, z, c, h_next

    def advance_hidden(self, obs: np.ndarray, actions: np.ndarray,
                       h: np.ndarray) -> np.ndarray:
        """Recurrent state update only, for rollout bookkeeping."""
        b, i, _ = obs.shape
        h_next = self._encode(obs, actions, h)[-1]
        return h_next.reshape(b, i, self.state_dim)

    def forward(self, obs: np.ndarray, actions: np.ndarray, h: np.ndarray,
                training: bool = False, rng: np.random.Generator | None = None):
        """Returns (q (B, I), next_hidden (B, I, S), cache)."""
        p = self.params
        b, i, _ = obs.shape
        e_dim = self.model_dim
        x, h_flat, u_pre, u, zin, z, c, h_next = self._encode(obs, actions, h)
        ein = np.concatenate([u, h_next], axis=1)
        e_pre = dense(p, "emb.e", ein)
        e = relu(e_pre)
        if training and self.dropout_rate > 0.0:
            e, mask = dropout(e, self.dropout_rate, rng)
        else:
            mask = None
        if self.use_attention:
            omega3, weights, att_cache = attention_forward(
                p, self.attn, e.reshape(b, i, e_dim), e.reshape(b, i, e_dim),
                mask=self.mask[:i, :i])
            omega = omega3.reshape(b * i, e_dim)
        else:
            omega = np.zeros((b * i, e_dim))
            weights, att_cache = None, None
        p_in = np.concatenate([e, omega], axis=1)
        p_pre = dense(p, "head.p", p_in)
        ph = relu(p_pre)
        v = dense(p, "head.v", ph)
        adv = dense(p, "head.adv", ph)
        a_flat = actions.reshape(b * i, self.num_actions)
        q_flat = v[:, 0] + (adv * a_flat).sum(axis=1) - adv.mean(axis=1)
        cache = {"b": b, "i": i, "x": x, "h_flat": h_flat, "u_pre": u_pre,
                 "u": u, "zin": zin, "z": z, "c": c, "h_next": h_next,
                 "ein": ein, "e_pre": e_pre, "e": e, "mask": mask,
                 "att_cache": att_cache, "p_in": p_in, "p_pre": p_pre,
                 "ph": ph, "adv": adv, "a_flat": a_flat, "weights": weights}
        return q_flat.reshape(b, i), h_next.reshape(b, i, self.state_dim), cache

    def backward(self, cache, dq: np.ndarray) -> np.ndarray:
        """Accumulates parameter gradients; returns d(actions) (B, I, A).

        The action gradient combines the dueling dot product with the
        encoder-input path, which is what the policy update needs.
        """
        p = self.params
        b, i = cache["b"], cache["i"]
        e_dim = self.model_dim
        num_a = self.num_actions
        dq_flat = dq.reshape(b * i, 1)
        dv = dq_flat
        dadv = dq_flat * (cache["a_flat"] - 1.0 / num_a)
        da_flat = dq_flat * cache["adv"]
        dph = dense_backward(p, "head.v", cache["ph"], dv)
        dph += dense_backward(p, "head.adv", cache["ph"], dadv)
        dp_in = dense_backward(p, "head.p", cache["p_in"],
                               relu_backward(cache["p_pre"], dph))
        de = dp_in[:, :e_dim].copy()
        domega = dp_in[:, e_dim:]
        if self.use_attention:
            dq_att, dk_att = attention_backward(
                p, self.attn, cache["att_cache"], domega.reshape(b, i, e_dim))
            de += (dq_att + dk_att).reshape(b * i, e_dim)
        if cache["mask"] is not None:
            de = dropout_backward(cache["mask"], de)
        dein = dense_backward(p, "emb.e", cache["ein"],
                              relu_backward(cache["e_pre"], de))
        du = dein[:, :e_dim].copy()
        dh_next = dein[:, e_dim:]
        dz = dh_next * (cache["c"] - cache["h_flat"])
        dc = dh_next * cache["z"]
        dzin = dense_backward(p, "gate.z", cache["zin"],
                              sigmoid_backward(cache["z"], dz))
        dzin += dense_backward(p, "gate.c", cache["zin"],
                               tanh_backward(cache["c"], dc))
        du += dzin[:, :e_dim]
        dx = dense_backward(p, "enc.u", cache["x"],
                            relu_backward(cache["u_pre"], du))
        da_flat = da_flat + dx[:, self.obs_dim:]
        return da_flat.reshape(b, i, num_a)
