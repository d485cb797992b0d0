"""Differentiable categorical sampling.

The Gumbel-softmax relaxation treats the noise draw as a constant, so
the backward pass is the softmax Jacobian scaled by the temperature.
"""

from __future__ import annotations

import numpy as np

from .ops import softmax

_TINY = 1e-12


def gumbel_noise(rng: np.random.Generator, shape) -> np.ndarray:
    u = np.clip(rng.random(shape), _TINY, 1.0 - _TINY)
    return -np.log(-np.log(u))


def sample_categorical(logits: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Gumbel-max draw; returns integer indices per row."""
    noisy = logits + gumbel_noise(rng, logits.shape)
    return np.argmax(noisy, axis=-1)


def gumbel_softmax(logits: np.ndarray, temperature: float,
                   rng: np.random.Generator, hard: bool = False):
    """Returns (sample, cache). With hard=True the sample is the one-hot
    argmax but the cache still backs the soft relaxation (straight-through)."""
    if temperature <= 0.0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    noisy = (logits + gumbel_noise(rng, logits.shape)) / temperature
    soft = softmax(noisy)
    cache = {"soft": soft, "temperature": temperature}
    if hard:
        idx = np.argmax(soft, axis=-1)
        sample = np.zeros_like(soft)
        sample[np.arange(soft.shape[0]), idx] = 1.0
        return sample, cache
    return soft, cache


def gumbel_softmax_backward(cache, dsample: np.ndarray) -> np.ndarray:
    soft = cache["soft"]
    inner = (dsample * soft).sum(axis=-1, keepdims=True)
    return soft * (dsample - inner) / cache["temperature"]


def tempered_softmax(logits: np.ndarray, temperature: float):
    """Noise-free relaxation softmax(logits / temperature) with cache."""
    if temperature <= 0.0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    soft = softmax(logits / temperature)
    return soft, {"soft": soft, "temperature": temperature}


def tempered_softmax_backward(cache, dsample: np.ndarray) -> np.ndarray:
    return gumbel_softmax_backward(cache, dsample)
