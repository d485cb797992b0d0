"""Categorical sampling and its softmax relaxation."""

from __future__ import annotations

import numpy as np
import pytest

from edgeoffload.nn.ops import softmax
from edgeoffload.nn.sampling import (gumbel_noise, gumbel_softmax,
                                     gumbel_softmax_backward,
                                     sample_categorical, tempered_softmax,
                                     tempered_softmax_backward)


def test_gumbel_noise_location():
    rng = np.random.default_rng(0)
    g = gumbel_noise(rng, (200_000,))
    assert np.isfinite(g).all()
    # standard Gumbel mean is the Euler-Mascheroni constant
    assert abs(g.mean() - 0.5772) < 0.01


def test_sample_frequencies_match_softmax():
    rng = np.random.default_rng(1)
    logits = np.array([[1.0, 0.0, -1.0, 2.0]])
    n = 100_000
    draws = sample_categorical(np.repeat(logits, n, axis=0), rng)
    freq = np.bincount(draws, minlength=4) / n
    target = softmax(logits)[0]
    assert 0.5 * np.abs(freq - target).sum() < 0.01  # total variation


def test_degenerate_logits_always_pick_the_peak():
    rng = np.random.default_rng(2)
    logits = np.array([[0.0, 1000.0, 0.0]])
    draws = sample_categorical(np.repeat(logits, 500, axis=0), rng)
    assert (draws == 1).all()


def test_gumbel_softmax_soft_output_is_distribution():
    rng = np.random.default_rng(3)
    logits = np.random.default_rng(0).standard_normal((6, 5))
    soft, cache = gumbel_softmax(logits, temperature=0.7, rng=rng)
    assert soft.shape == (6, 5)
    assert np.allclose(soft.sum(axis=-1), 1.0)
    assert (soft > 0).all()
    assert cache["temperature"] == 0.7


def test_gumbel_softmax_hard_is_straight_through():
    rng = np.random.default_rng(4)
    logits = np.random.default_rng(1).standard_normal((8, 4))
    hard, cache = gumbel_softmax(logits, temperature=0.5, rng=rng, hard=True)
    assert set(np.unique(hard)) == {0.0, 1.0}
    assert np.array_equal(hard.sum(axis=-1), np.ones(8))
    # the cached relaxation peaks where the hard sample fired
    assert np.array_equal(np.argmax(cache["soft"], axis=-1),
                          np.argmax(hard, axis=-1))


def test_low_temperature_approaches_argmax():
    rng = np.random.default_rng(5)
    logits = np.array([[2.0, 0.0, -2.0]])
    soft, _ = gumbel_softmax(logits, temperature=1e-3, rng=rng)
    assert soft.max() > 0.999


def test_temperature_must_be_positive():
    rng = np.random.default_rng(6)
    with pytest.raises(ValueError):
        gumbel_softmax(np.zeros((1, 3)), temperature=0.0, rng=rng)
    with pytest.raises(ValueError):
        tempered_softmax(np.zeros((1, 3)), temperature=-1.0)


def test_gumbel_softmax_backward_matches_finite_differences():
    logits = np.random.default_rng(2).standard_normal((3, 4))
    dy = np.random.default_rng(3).standard_normal((3, 4))
    temperature = 0.6

    def forward(z):
        # freeze the noise draw: same seed every call
        soft, _ = gumbel_softmax(z, temperature, np.random.default_rng(42))
        return float((soft * dy).sum())

    _, cache = gumbel_softmax(logits, temperature, np.random.default_rng(42))
    analytic = gumbel_softmax_backward(cache, dy)
    eps = 1e-6
    numeric = np.zeros_like(logits)
    flat = logits.reshape(-1)
    for k in range(flat.size):
        orig = flat[k]
        flat[k] = orig + eps
        up = forward(logits)
        flat[k] = orig - eps
        down = forward(logits)
        flat[k] = orig
        numeric.reshape(-1)[k] = (up - down) / (2 * eps)
    assert np.allclose(analytic, numeric, rtol=1e-5, atol=1e-8)


def test_tempered_softmax_is_noise_free_and_differentiable():
    logits = np.random.default_rng(4).standard_normal((2, 5))
    soft, cache = tempered_softmax(logits, 0.5)
    assert np.array_equal(soft, softmax(logits / 0.5))

    dy = np.random.default_rng(5).standard_normal((2, 5))
    analytic = tempered_softmax_backward(cache, dy)
    eps = 1e-6
    flat = logits.reshape(-1)
    for k in range(flat.size):
        orig = flat[k]
        flat[k] = orig + eps
        up = float((tempered_softmax(logits, 0.5)[0] * dy).sum())
        flat[k] = orig - eps
        down = float((tempered_softmax(logits, 0.5)[0] * dy).sum())
        flat[k] = orig
        assert analytic.reshape(-1)[k] == pytest.approx(
            (up - down) / (2 * eps), rel=1e-5, abs=1e-8)
