"""Task records and the event vocabulary of the simulator."""

from __future__ import annotations

from dataclasses import dataclass, field


# Task lifecycle states.
PENDING = "pending"          # generated this interval, not yet routed
QUEUED_LOCAL = "queued-local"
TRANSMITTING = "transmitting"
QUEUED_EDGE = "queued-edge"
COMPLETED = "completed"
DROPPED = "dropped"

# Event kinds written to traces.
EV_GEN = "gen"
EV_ROUTE_LOCAL = "route_local"
EV_ROUTE_ES = "route_es"
EV_TX_DONE = "tx_done"
EV_DONE = "done"
EV_DROP = "drop"


@dataclass
class Task:
    """One generated task and its bookkeeping.

    Interval stamps follow one convention: a stamp k means the event
    coincides with clock tick k, i.e. the work finished during interval
    k - 1. A task born at interval t0 that finishes with stamp k has
    response latency (k - t0) * interval_s.
    """

    task_id: int
    owner: int
    born_interval: int
    size_mb: float
    density_gc_mb: float   # Gcycles per MB
    deadline_s: float
    status: str = PENDING
    assigned_es: int | None = None
    remaining_tx_mb: float = 0.0
    remaining_compute_mb: float = 0.0
    local_finish_stamp: int | None = None
    tx_done_stamp: int | None = None
    finish_stamp: int | None = None


@dataclass
class TaskEvent:
    """Trace row: one lifecycle event of one task."""

    interval: int
    ied: int
    task_id: int
    kind: str
    latency_s: float | None = None
    es: int | None = None


@dataclass
class FinishEvent:
    """Terminal outcome of a task, used for rewards and the objective."""

    interval: int
    ied: int
    task_id: int
    kind: str                    # EV_DONE or EV_DROP
    deadline_s: float
    response_s: float | None     # total latency for completions, None for drops
    local: bool = False
    latency_local_s: float = 0.0
    latency_comm_s: float = 0.0
    latency_edge_s: float = 0.0


@dataclass
class EdgeArrival:
    """A fully transmitted task handed to an edge server's queue."""

    interval: int
    ied: int
    es: int
    task: Task = field(repr=False, default=None)
