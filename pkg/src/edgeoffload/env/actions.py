"""Discrete routing actions: 0 = compute locally, k >= 1 = edge server k - 1."""

from __future__ import annotations

import numpy as np

from ..errors import ProtocolError


def num_actions(num_ess: int) -> int:
    return num_ess + 1


def encode_onehot(action: int, n_actions: int) -> np.ndarray:
    if not 0 <= action < n_actions:
        raise ProtocolError(f"action {action} out of range 0..{n_actions - 1}")
    out = np.zeros(n_actions)
    out[action] = 1.0
    return out


def decode_onehot(onehot: np.ndarray) -> int:
    if onehot.ndim != 1 or not np.isclose(onehot.sum(), 1.0):
        raise ProtocolError("one-hot action must be a unit-sum vector")
    return int(np.argmax(onehot))
