"""Central finite-difference verification of analytic gradients.

The caller runs a forward/backward pass first so the store holds analytic
gradients, then hands over a pure loss function of the current parameter
values. Each checked entry is perturbed in place by +/- epsilon.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import NumericalError
from .store import ParamStore


@dataclass
class GradCheckReport:
    max_rel_error: float
    worst_param: str
    worst_index: tuple
    entries_checked: int
    per_param: dict = field(default_factory=dict)

    def ok(self, tolerance: float) -> bool:
        return self.max_rel_error <= tolerance


def relative_error(analytic: float, numeric: float) -> float:
    scale = max(abs(analytic), abs(numeric), 1e-6)
    return abs(analytic - numeric) / scale


def finite_difference_check(store: ParamStore, loss_fn,
                            params: list[str] | None = None,
                            epsilon: float = 1e-6) -> GradCheckReport:
    names = list(params) if params is not None else store.names()
    worst = 0.0
    worst_param = ""
    worst_index: tuple = ()
    checked = 0
    per_param: dict[str, float] = {}
    for name in names:
        value = store.value(name)
        analytic = store.grad(name)
        if not np.all(np.isfinite(analytic)):
            raise NumericalError(f"analytic gradient for '{name}' is not finite")
        local = 0.0
        for idx in np.ndindex(value.shape):
            original = value[idx]
            value[idx] = original + epsilon
            plus = loss_fn()
            value[idx] = original - epsilon
            minus = loss_fn()
            value[idx] = original
            if not (np.isfinite(plus) and np.isfinite(minus)):
                raise NumericalError(
                    f"loss is not finite while perturbing '{name}'")
            numeric = (plus - minus) / (2.0 * epsilon)
            rel = relative_error(float(analytic[idx]), float(numeric))
            checked += 1
            if rel > local:
                local = rel
            if rel > worst:
                worst = rel
                worst_param = name
                worst_index = idx
        per_param[name] = local
    return GradCheckReport(worst, worst_param, worst_index, checked, per_param)
