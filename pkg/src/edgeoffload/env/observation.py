"""Per-agent observation vectors.

Layout for M edge servers (length 4 + 4M), every entry min-max scaled
to [0, 1] with clipping:

    0       task size (0 when no fresh task this interval)
    1       task compute density
    2       task deadline
    3       local-queue wait estimate, excluding the candidate task itself
    4..     own uplink queue backlogs as of the previous interval   (M)
    4+M..   own edge queue backlogs as of the previous interval     (M)
    4+2M..  current normalized channel gains                        (M)
    4+3M..  large-scale path-loss coefficients                      (M)
"""

from __future__ import annotations

import numpy as np

from ..config import ObsParams
from ..sim.system import MIN_DISTANCE_M, SystemState


def observation_dim(num_ess: int) -> int:
    return 4 + 4 * num_ess


def _norm(x, lo, hi):
    span = hi - lo
    if span <= 0.0:
        span = 1e-12
    return np.clip((x - lo) / span, 0.0, 1.0)


def build_observation(state: SystemState, i: int,
                      obs_params: ObsParams | None = None) -> np.ndarray:
    """Observation for IED i at the current interval.

    The caller must have already updated gains and spawned tasks for this
    interval; queue entries reflect the end of the previous interval.
    """
    p = obs_params or ObsParams()
    cfg = state.config
    m = cfg.num_ess
    out = np.zeros(observation_dim(m))
    task = state.pending.get(i)
    if task is not None:
        out[0] = _norm(task.size_mb, *cfg.size_range_mb)
        out[1] = _norm(task.density_gc_mb, *cfg.density_range)
        out[2] = _norm(task.deadline_s, *cfg.deadline_range_s)
    wait = state.local_queues[i].backlog_estimate_s(state.t, cfg.interval_s)
    out[3] = _norm(wait, 0.0, cfg.deadline_range_s[1])
    out[4:4 + m] = _norm(state.prev_comm_backlog[i], 0.0, p.queue_cap_mb)
    out[4 + m:4 + 2 * m] = _norm(state.prev_edge_backlog[i], 0.0, p.queue_cap_mb)
    out[4 + 2 * m:4 + 3 * m] = _norm(state.gains[i], 0.0, p.gain_cap)
    # raw pathloss spans many decades (distance clamp 1 m .. sqrt(2)*area),
    # so min-max normalize its log: 1.0 at the clamp, 0.0 at the far corner
    span = cfg.pathloss_exp * np.log(np.sqrt(2.0) * cfg.area_m)
    out[4 + 3 * m:4 + 4 * m] = np.clip(
        1.0 + np.log(state.pathloss[i]) / span, 0.0, 1.0)
    return out


def observe_all(state: SystemState,
                obs_params: ObsParams | None = None) -> np.ndarray:
    return np.stack([build_observation(state, i, obs_params)
                     for i in range(state.config.num_ieds)])
