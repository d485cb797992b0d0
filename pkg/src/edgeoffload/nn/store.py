"""Named parameter store with paired gradients and Adam moments.

All parameters are 2-D float64 arrays. Initialization is keyed by the
parameter name, so two stores built with the same seed hold identical
values for identically named parameters regardless of registration
order; that makes reduced variants of a network exact sub-models.
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError
from ..seeds import child_rng


class ParamStore:
    def __init__(self, seed: int = 0):
        self.seed = int(seed)
        self.values: dict[str, np.ndarray] = {}
        self.grads: dict[str, np.ndarray] = {}
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}
        self.step_count = 0

    # -- registration -------------------------------------------------------

    def add(self, name: str, array: np.ndarray) -> None:
        arr = np.asarray(array, dtype=np.float64)
        if arr.ndim != 2:
            raise ShapeError(f"parameter '{name}' must be 2-D, got shape {arr.shape}")
        if name in self.values:
            raise ShapeError(f"parameter '{name}' registered twice")
        self.values[name] = arr
        self.grads[name] = np.zeros_like(arr)
        self.m[name] = np.zeros_like(arr)
        self.v[name] = np.zeros_like(arr)

    def add_dense(self, name: str, fan_in: int, fan_out: int) -> None:
        """Register `<name>.w` and `<name>.b` with uniform fan-based init."""
        rng = child_rng(self.seed, "init", name)
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        self.add(f"{name}.w", rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        self.add(f"{name}.b", np.zeros((1, fan_out)))

    # -- access -------------------------------------------------------------

    def names(self) -> list[str]:
        return list(self.values.keys())

    def value(self, name: str) -> np.ndarray:
        return self.values[name]

    def grad(self, name: str) -> np.ndarray:
        return self.grads[name]

    def accumulate(self, name: str, grad: np.ndarray) -> None:
        g = self.grads[name]
        if g.shape != grad.shape:
            raise ShapeError(
                f"gradient for '{name}' has shape {grad.shape}, expected {g.shape}")
        g += grad

    def zero_grads(self) -> None:
        for g in self.grads.values():
            g[...] = 0.0

    def num_params(self) -> int:
        return sum(arr.size for arr in self.values.values())

    def clip_grad_norm(self, max_norm: float) -> float:
        """Scale all gradients so their global L2 norm is at most max_norm.

        Returns the norm before clipping."""
        total = 0.0
        for g in self.grads.values():
            total += float((g * g).sum())
        norm = float(np.sqrt(total))
        if norm > max_norm > 0.0:
            scale = max_norm / norm
            for g in self.grads.values():
                g *= scale
        return norm

    # -- optimization ---------------------------------------------------------

    def adam_step(self, lr: float, beta1: float = 0.9, beta2: float = 0.999,
                  eps: float = 1e-8) -> None:
        """One bias-corrected adaptive moment update; clears gradients."""
        self.step_count += 1
        t = self.step_count
        c1 = 1.0 - beta1 ** t
        c2 = 1.0 - beta2 ** t
        for name, value in self.values.items():
            g = self.grads[name]
            m = self.m[name]
            v = self.v[name]
            m *= beta1
            m += (1.0 - beta1) * g
            v *= beta2
            v += (1.0 - beta2) * g * g
            value -= lr * (m / c1) / (np.sqrt(v / c2) + eps)
        self.zero_grads()

    # -- copying / serialization ---------------------------------------------

    def copy(self) -> "ParamStore":
        out = ParamStore(seed=self.seed)
        for name, arr in self.values.items():
            out.add(name, arr.copy())
            out.m[name] = self.m[name].copy()
            out.v[name] = self.v[name].copy()
        out.step_count = self.step_count
        return out

    def load_values(self, arrays: dict[str, np.ndarray]) -> None:
        for name, arr in arrays.items():
            if name not in self.values:
                raise ShapeError(f"unknown parameter '{name}'")
            if self.values[name].shape != arr.shape:
                raise ShapeError(
                    f"parameter '{name}' has shape {self.values[name].shape}, "
                    f"loaded array has {arr.shape}")
            self.values[name] = np.asarray(arr, dtype=np.float64).copy()

    def digest(self) -> bytes:
        import hashlib
        h = hashlib.sha256()
        for name in sorted(self.values):
            h.update(name.encode())
            h.update(self.values[name].tobytes())
        return h.digest()


def adaptive_moment_step(store: ParamStore, lr: float, beta1: float = 0.9,
                         beta2: float = 0.999, eps: float = 1e-8) -> None:
    store.adam_step(lr, beta1=beta1, beta2=beta2, eps=eps)
