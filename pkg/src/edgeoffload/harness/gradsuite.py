"""Finite-difference verification cases for the learning stack.

Each case builds a toy-sized network, runs one analytic backward pass
for a scalar probe loss, then compares every parameter against central
differences. Dropout is disabled so the probe losses are pure functions
of the parameters.
"""

from __future__ import annotations

import numpy as np

from ..learn.actor import ActorNet
from ..learn.critic import AttentiveCritic
from ..nn.gradcheck import GradCheckReport, finite_difference_check
from ..seeds import child_rng, child_seed

CASES = ("actor", "critic-attention", "critic-plain")

_OBS = 5
_ACTIONS = 3
_AGENTS = 3
_BATCH = 2
_STATE = 4


def _actor_case(seed: int) -> GradCheckReport:
    net = ActorNet(_OBS, _ACTIONS, hidden=6, state_dim=_STATE,
                   dropout_rate=0.0, seed=child_seed(seed, "probe-actor"))
    rng = child_rng(seed, "probe-actor-data")
    obs = rng.standard_normal((_BATCH, _OBS))
    h = rng.standard_normal((_BATCH, _STATE))
    coef = rng.standard_normal((_BATCH, _ACTIONS))

    def loss() -> float:
        logits, _, _ = net.forward(obs, h)
        return float((logits * coef).sum())

    net.params.zero_grads()
    _, _, cache = net.forward(obs, h)
    net.backward(cache, coef)
    return finite_difference_check(net.params, loss)


def _critic_case(seed: int, use_attention: bool) -> GradCheckReport:
    net = AttentiveCritic(_OBS, _ACTIONS, _AGENTS, model_dim=8, attn_heads=2,
                          state_dim=_STATE, head_hidden=6, dropout_rate=0.0,
                          use_attention=use_attention,
                          seed=child_seed(seed, "probe-critic"))
    rng = child_rng(seed, "probe-critic-data")
    obs = rng.standard_normal((_BATCH, _AGENTS, _OBS))
    raw = rng.standard_normal((_BATCH, _AGENTS, _ACTIONS))
    ex = np.exp(raw - raw.max(axis=-1, keepdims=True))
    actions = ex / ex.sum(axis=-1, keepdims=True)
    h = rng.standard_normal((_BATCH, _AGENTS, _STATE))
    coef = rng.standard_normal((_BATCH, _AGENTS))

    def loss() -> float:
        q, _, _ = net.forward(obs, actions, h)
        return float((q * coef).sum())

    net.params.zero_grads()
    _, _, cache = net.forward(obs, actions, h)
    net.backward(cache, coef)
    return finite_difference_check(net.params, loss)


def run_case(case: str, seed: int) -> GradCheckReport:
    if case == "actor":
        return _actor_case(seed)
    if case == "critic-attention":
        return _critic_case(seed, True)
    if case == "critic-plain":
        return _critic_case(seed, False)
    raise ValueError(f"unknown gradient case {case!r}")


def gradient_suite(seeds=(0, 1, 2), tolerance: float = 1e-4):
    """Returns (passed, rows); one row per (case, seed)."""
    rows = []
    passed = True
    for case in CASES:
        for seed in seeds:
            report = run_case(case, int(seed))
            ok = report.ok(tolerance)
            passed = passed and ok
            rows.append({
                "case": case, "seed": int(seed),
                "max_rel_error": report.max_rel_error,
                "worst_param": report.worst_param,
                "entries": report.entries_checked,
                "ok": ok,
            })
    return passed, rows


def write_gradcheck_report(path: str, rows, tolerance: float,
                           passed: bool) -> None:
    lines = [f"tolerance {tolerance:g}",
             f"result {'pass' if passed else 'FAIL'}"]
    for row in rows:
        lines.append(
            f"{row['case']} seed={row['seed']} "
            f"max_rel={row['max_rel_error']:.3e} "
            f"worst={row['worst_param']} entries={row['entries']} "
            f"{'ok' if row['ok'] else 'FAIL'}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
