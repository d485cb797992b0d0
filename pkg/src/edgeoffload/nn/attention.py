"""Multi-head scaled dot-product attention with exact backward.

Queries attend over a separate key/value set. An optional boolean mask
(True = may attend) supports excluding entries such as self-attention
diagonals. Rows with nothing to attend to, and empty key sets, yield a
zero context vector by definition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError
from ..seeds import child_rng
from .store import ParamStore


@dataclass
class AttentionSpec:
    name: str
    num_heads: int
    model_dim: int

    @property
    def key_dim(self) -> int:
        return self.model_dim // self.num_heads

    def validate(self) -> None:
        if self.model_dim % self.num_heads != 0:
            raise ShapeError(
                f"model_dim {self.model_dim} not divisible by "
                f"num_heads {self.num_heads}")


def register_attention(store: ParamStore, spec: AttentionSpec) -> None:
    spec.validate()
    e = spec.model_dim
    limit = np.sqrt(6.0 / (e + e))
    for proj in ("wq", "wk", "wv"):
        rng = child_rng(store.seed, "init", f"{spec.name}.{proj}")
        store.add(f"{spec.name}.{proj}", rng.uniform(-limit, limit, size=(e, e)))
    store.add_dense(f"{spec.name}.out", e, e)


def _split_heads(x: np.ndarray, heads: int) -> np.ndarray:
    b, n, e = x.shape
    return x.reshape(b, n, heads, e // heads).transpose(0, 2, 1, 3)


def _merge_heads(x: np.ndarray) -> np.ndarray:
    b, h, n, d = x.shape
    return x.transpose(0, 2, 1, 3).reshape(b, n, h * d)


def attention_forward(store: ParamStore, spec: AttentionSpec,
                      queries: np.ndarray, keys: np.ndarray,
                      mask: np.ndarray | None = None):
    """Returns (out (B,N,E), weights (B,H,N,K), cache)."""
    if queries.ndim != 3 or keys.ndim != 3:
        raise ShapeError("attention expects (batch, items, model_dim) inputs")
    if queries.shape[-1] != spec.model_dim or keys.shape[-1] != spec.model_dim:
        raise ShapeError(
            f"attention '{spec.name}': inputs {queries.shape}/{keys.shape} "
            f"do not match model_dim {spec.model_dim}")
    b, n, e = queries.shape
    k = keys.shape[1]
    h = spec.num_heads
    if k == 0:
        cache = {"empty": True, "b": b, "n": n, "e": e}
        return np.zeros((b, n, e)), np.zeros((b, h, n, 0)), cache
    wq = store.value(f"{spec.name}.wq")
    wk = store.value(f"{spec.name}.wk")
    wv = store.value(f"{spec.name}.wv")
    wo = store.value(f"{spec.name}.out.w")
    bo = store.value(f"{spec.name}.out.b")
    q = _split_heads(queries @ wq, h)           # (B,H,N,dk)
    kk = _split_heads(keys @ wk, h)             # (B,H,K,dk)
    vv = _split_heads(keys @ wv, h)             # (B,H,K,dk)
    scale = 1.0 / np.sqrt(spec.key_dim)
    logits = (q @ kk.transpose(0, 1, 3, 2)) * scale
    if mask is not None:
        logits = np.where(mask[None, None], logits, -np.inf)
    rowmax = logits.max(axis=-1, keepdims=True)
    safe = np.where(np.isfinite(rowmax), rowmax, 0.0)
    ex = np.where(np.isfinite(logits), np.exp(logits - safe), 0.0)
    denom = ex.sum(axis=-1, keepdims=True)
    weights = np.where(denom > 0.0, ex / np.where(denom > 0.0, denom, 1.0), 0.0)
    ctx = weights @ vv
    merged = _merge_heads(ctx)                   # (B,N,E)
    out = merged @ wo + bo
    cache = {
        "empty": False, "queries": queries, "keys": keys, "q": q, "k": kk,
        "v": vv, "weights": weights, "merged": merged, "scale": scale,
    }
    return out, weights, cache


def attention_backward(store: ParamStore, spec: AttentionSpec, cache,
                       dout: np.ndarray):
    """Returns (dqueries, dkeys); accumulates parameter gradients."""
    if cache["empty"]:
        b, n, e = cache["b"], cache["n"], cache["e"]
        return np.zeros((b, n, e)), np.zeros((b, 0, e))
    queries = cache["queries"]
    keys = cache["keys"]
    weights = cache["weights"]
    h = spec.num_heads
    b, n, e = queries.shape
    wq = store.value(f"{spec.name}.wq")
    wk = store.value(f"{spec.name}.wk")
    wv = store.value(f"{spec.name}.wv")
    wo = store.value(f"{spec.name}.out.w")

    merged_flat = cache["merged"].reshape(b * n, e)
    dout_flat = dout.reshape(b * n, e)
    store.accumulate(f"{spec.name}.out.w", merged_flat.T @ dout_flat)
    store.accumulate(f"{spec.name}.out.b", dout_flat.sum(axis=0, keepdims=True))
    dmerged = (dout @ wo.T)
    dctx = _split_heads(dmerged, h)                                  # (B,H,N,dk)

    dweights = dctx @ cache["v"].transpose(0, 1, 3, 2)
    dv = weights.transpose(0, 1, 3, 2) @ dctx
    inner = (dweights * weights).sum(axis=-1, keepdims=True)
    dlogits = weights * (dweights - inner)
    dlogits = dlogits * cache["scale"]
    dq = dlogits @ cache["k"]
    dk = dlogits.transpose(0, 1, 3, 2) @ cache["q"]

    dq_m = _merge_heads(dq)
    dk_m = _merge_heads(dk)
    dv_m = _merge_heads(dv)
    q_flat = queries.reshape(b * n, e)
    k_flat = keys.reshape(-1, e)
    store.accumulate(f"{spec.name}.wq", q_flat.T @ dq_m.reshape(b * n, e))
    store.accumulate(f"{spec.name}.wk", k_flat.T @ dk_m.reshape(-1, e))
    store.accumulate(f"{spec.name}.wv", k_flat.T @ dv_m.reshape(-1, e))
    dqueries = dq_m @ wq.T
    dkeys = dk_m @ wk.T + dv_m @ wv.T
    return dqueries, dkeys


def multi_head_attention(store: ParamStore, spec: AttentionSpec,
                         query_set: np.ndarray, key_value_set: np.ndarray,
                         mask: np.ndarray | None = None):
    """Convenience wrapper accepting 2-D (items, model_dim) sets."""
    squeeze = query_set.ndim == 2
    q = query_set[None] if squeeze else query_set
    kv = key_value_set[None] if key_value_set.ndim == 2 else key_value_set
    out, weights, _ = attention_forward(store, spec, q, kv, mask=mask)
    if squeeze:
        return out[0], weights[0]
    return out, weights
