"""Policy network: dense encoder feeding a gated recurrent state.

The hidden state carries queue context across intervals. Recurrence is
truncated at one step: the incoming state is treated as data, so no
gradient flows across interval boundaries.
"""

from __future__ import annotations

import numpy as np

from ..nn.ops import (dense, dense_backward, dropout, dropout_backward, relu,
                      relu_backward, sigmoid, sigmoid_backward, tanh,
                      tanh_backward)
from ..nn.store import ParamStore


class ActorNet:
    def __init__(self, obs_dim: int, num_actions: int, hidden: int = 64,
                 state_dim: int = 16, dropout_rate: float = 0.1, seed: int = 0):
        self.obs_dim = obs_dim
        self.num_actions = num_actions
        self.hidden = hidden
        self.state_dim = state_dim
        self.dropout_rate = dropout_rate
        self.params = ParamStore(seed=seed)
        self.params.add_dense("enc.u", obs_dim, hidden)
        self.params.add_dense("gate.z", hidden + state_dim, state_dim)
        self.params.add_dense("gate.c", hidden + state_dim, state_dim)
        self.params.add_dense("emb.e", hidden + state_dim, hidden)
        self.params.add_dense("out", hidden, num_actions)

    def initial_state(self, batch: int) -> np.ndarray:
        return np.zeros((batch, self.state_dim))

    def forward(self, obs: np.ndarray, h: np.ndarray, training: bool = False,
                rng: np.random.Generator | None = None):
        """Returns (logits, next_hidden, cache) for a (B, obs_dim) batch."""
        p = self.params
        u_pre = dense(p, "enc.u", obs)
        u = relu(u_pre)
        zin = np.concatenate([u, h], axis=1)
        z = sigmoid(dense(p, "gate.z", zin))
        c = tanh(dense(p, "gate.c", zin))
        h_next = (1.0 - z) * h + z * c
        ein = np.concatenate([u, h_next], axis=1)
        e_pre = dense(p, "emb.e", ein)
        e = relu(e_pre)
        if training and self.dropout_rate > 0.0:
            e, mask = dropout(e, self.dropout_rate, rng)
        else:
            mask = None
        logits = dense(p, "out", e)
        cache = {"obs": obs, "h": h, "u_pre": u_pre, "u": u, "zin": zin,
                 "z": z, "c": c, "h_next": h_next, "ein": ein,
                 "e_pre": e_pre, "e": e, "mask": mask}
        return logits, h_next, cache

    def backward(self, cache, dlogits: np.ndarray) -> np.ndarray:
        """Accumulates parameter gradients; returns d(obs)."""
        p = self.params
        hid = self.hidden
        de = dense_backward(p, "out", cache["e"], dlogits)
        if cache["mask"] is not None:
            de = dropout_backward(cache["mask"], de)
        dein = dense_backward(p, "emb.e", cache["ein"],
                              relu_backward(cache["e_pre"], de))
        du = dein[:, :hid].copy()
        dh_next = dein[:, hid:]
        # h_next = (1 - z) h + z c, with the incoming h detached
        dz = dh_next * (cache["c"] - cache["h"])
        dc = dh_next * cache["z"]
        dzin = dense_backward(p, "gate.z", cache["zin"],
                              sigmoid_backward(cache["z"], dz))
        dzin += dense_backward(p, "gate.c", cache["zin"],
                               tanh_backward(cache["c"], dc))
        du += dzin[:, :hid]
        dobs = dense_backward(p, "enc.u", cache["obs"],
                              relu_backward(cache["u_pre"], du))
        return dobs
