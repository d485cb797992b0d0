"""Differentiable primitives: dense maps, activations, softmax, dropout.

Every forward has an exact hand-derived backward. Backwards take the
same cached inputs the forward saw and return the gradient with respect
to the op's input; parameter gradients accumulate into the store.
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError
from .store import ParamStore


def dense(store: ParamStore, name: str, x: np.ndarray) -> np.ndarray:
    w = store.value(f"{name}.w")
    b = store.value(f"{name}.b")
    if x.ndim != 2 or x.shape[1] != w.shape[0]:
        raise ShapeError(
            f"dense '{name}': input {x.shape} incompatible with weight {w.shape}")
    return x @ w + b


def dense_backward(store: ParamStore, name: str, x: np.ndarray,
                   dy: np.ndarray) -> np.ndarray:
    w = store.value(f"{name}.w")
    if dy.shape != (x.shape[0], w.shape[1]):
        raise ShapeError(
            f"dense '{name}' backward: dy {dy.shape} incompatible with "
            f"x {x.shape} and weight {w.shape}")
    store.accumulate(f"{name}.w", x.T @ dy)
    store.accumulate(f"{name}.b", dy.sum(axis=0, keepdims=True))
    return dy @ w.T


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def relu_backward(x: np.ndarray, dy: np.ndarray) -> np.ndarray:
    return dy * (x > 0.0)


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid_backward(y: np.ndarray, dy: np.ndarray) -> np.ndarray:
    """Backward from the forward's output y = sigmoid(x)."""
    return dy * y * (1.0 - y)


def tanh(x: np.ndarray) -> np.ndarray:
    return np.tanh(x)


def tanh_backward(y: np.ndarray, dy: np.ndarray) -> np.ndarray:
    return dy * (1.0 - y * y)


def softmax(x: np.ndarray) -> np.ndarray:
    """Row-wise softmax, stabilized by max subtraction."""
    shifted = x - x.max(axis=-1, keepdims=True)
    ex = np.exp(shifted)
    return ex / ex.sum(axis=-1, keepdims=True)


def softmax_backward(probs: np.ndarray, dprobs: np.ndarray) -> np.ndarray:
    inner = (dprobs * probs).sum(axis=-1, keepdims=True)
    return probs * (dprobs - inner)


def log_softmax(x: np.ndarray) -> np.ndarray:
    shifted = x - x.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def log_softmax_backward(log_probs: np.ndarray, dlp: np.ndarray) -> np.ndarray:
    return dlp - np.exp(log_probs) * dlp.sum(axis=-1, keepdims=True)


def dropout(x: np.ndarray, rate: float,
             rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Inverted dropout; returns (output, mask) with mask pre-scaled."""
    if rate <= 0.0:
        mask = np.ones_like(x)
        return x, mask
    mask = (rng.random(x.shape) >= rate) / (1.0 - rate)
    return x * mask, mask


def dropout_backward(mask: np.ndarray, dy: np.ndarray) -> np.ndarray:
    return dy * mask
