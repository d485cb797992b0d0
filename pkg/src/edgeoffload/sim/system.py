"""Discrete-time system state and the per-interval queue dynamics.

Time advances in fixed intervals of `interval_s` seconds. Within one
interval the driver calls, in order:

    update_channel_gains(t)
    spawn_tasks(t)
    apply_actions(actions)        # route every fresh task
    step_comm_queues(t)           # uplink transmission
    step_edge_queues(t)           # edge computation (sees this interval's arrivals)
    step_local_queues(t)          # collect local completions due this interval
    enforce_deadlines(t)          # drop everything past its deadline
    finalize_interval(t)

Stamp convention: stamp k = clock tick k, i.e. the work finished during
interval k - 1. A task born at t0 finishing with stamp k has response
latency (k - t0) * interval_s, and is dropped at the first interval t
where (t + 1 - t0) * interval_s exceeds its deadline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..config import SystemConfig
from ..errors import ProtocolError
from ..seeds import child_rng
from .metrics import EpisodeLedger
from .tasks import (COMPLETED, DROPPED, EV_DONE, EV_DROP, EV_GEN, EV_ROUTE_ES,
                    EV_ROUTE_LOCAL, EV_TX_DONE, PENDING, QUEUED_EDGE,
                    QUEUED_LOCAL, TRANSMITTING, EdgeArrival, FinishEvent, Task,
                    TaskEvent)

BITS_PER_MB = 8e6
# Guard for float products landing a few ulps above an exact integer ratio;
# without it ceil() would charge a whole spurious interval.
CEIL_GUARD = 1e-9
MIN_DISTANCE_M = 1.0


def equal_share_hz(bandwidth_hz: float, n: int) -> float:
    """Per-queue bandwidth share whose exact sum never exceeds the band.

    Round-to-nearest division can land half an ulp high, in which case
    n shares sum to slightly more than the band in exact arithmetic.
    One step toward zero restores share * n <= bandwidth as rationals.
    """
    share = bandwidth_hz / n
    if Fraction(share) * n > Fraction(bandwidth_hz):
        share = math.nextafter(share, 0.0)
    return share


def service_width_intervals(size_mb: float, density_gc_mb: float,
                            gpu_hz: float, interval_s: float) -> int:
    """Whole intervals needed to compute a task on one processor."""
    work_gc = size_mb * density_gc_mb
    cap_gc = gpu_hz * interval_s / 1e9
    return max(1, math.ceil(work_gc / cap_gc - CEIL_GUARD))


def local_completion_interval(tau_hat: int, t: int, width: int) -> int:
    """FIFO completion stamp: the server starts no earlier than now."""
    return max(tau_hat, t) + width


@dataclass
class LocalQueue:
    owner: int
    tau_hat: int = 0                      # stamp when the server frees up
    tasks: list[Task] = field(default_factory=list)

    def backlog_estimate_s(self, t: int, interval_s: float) -> float:
        return max(self.tau_hat - t, 0) * interval_s


@dataclass
class CommQueue:
    ied: int
    es: int
    channel: int
    backlog_mb: float = 0.0
    tasks: list[Task] = field(default_factory=list)


@dataclass
class EdgeQueue:
    es: int
    ied: int
    backlog_mb: float = 0.0
    tasks: list[Task] = field(default_factory=list)


class SystemState:
    """All mutable state of one deployment across one episode."""

    def __init__(self, config: SystemConfig, seed: int | None = None):
        config.validate()
        self.config = config
        self.seed = config.seed if seed is None else int(seed)
        self.t = 0
        i, m = config.num_ieds, config.num_ess
        rng_place = child_rng(self.seed, "place")
        self.ied_pos = rng_place.uniform(0.0, config.area_m, size=(i, 2))
        self.es_pos = rng_place.uniform(0.0, config.area_m, size=(m, 2))
        self.ied_gpu_hz = rng_place.uniform(*config.ied_gpu_hz, size=i)
        self.es_gpu_hz = rng_place.uniform(*config.es_gpu_hz, size=m)
        diff = self.ied_pos[:, None, :] - self.es_pos[None, :, :]
        dist = np.maximum(np.sqrt((diff ** 2).sum(axis=2)), MIN_DISTANCE_M)
        self.pathloss = dist ** (-config.pathloss_exp)       # (I, M)
        self.gains = self.pathloss / self.pathloss.mean()
        self.rng_spawn = child_rng(self.seed, "spawn")
        self.rng_fields = child_rng(self.seed, "fields")
        self.rng_fade = child_rng(self.seed, "fade")
        self.local_queues = [LocalQueue(owner=k) for k in range(i)]
        self.comm_queues = [[CommQueue(ied=k, es=j, channel=k % config.num_channels)
                             for j in range(m)] for k in range(i)]
        self.edge_queues = [[EdgeQueue(es=j, ied=k) for k in range(i)]
                            for j in range(m)]
        self.prev_comm_backlog = np.zeros((i, m))
        self.prev_edge_backlog = np.zeros((i, m))
        self.pending: dict[int, Task] = {}
        self.in_flight = 0
        self.next_task_id = 0
        self.warnings: dict[str, int] = {}
        self.ledger = EpisodeLedger()

    # -- helpers ----------------------------------------------------------

    def _warn(self, key: str) -> None:
        self.warnings[key] = self.warnings.get(key, 0) + 1

    def _expired(self, task: Task, t: int) -> bool:
        return (t + 1 - task.born_interval) * self.config.interval_s > task.deadline_s

    def _finish(self, task: Task, t: int, kind: str) -> None:
        task.status = COMPLETED if kind == EV_DONE else DROPPED
        self.in_flight -= 1
        dt = self.config.interval_s
        if kind == EV_DONE:
            response = (task.finish_stamp - task.born_interval) * dt
            local = task.assigned_es is None
            ev = FinishEvent(
                interval=t, ied=task.owner, task_id=task.task_id, kind=EV_DONE,
                deadline_s=task.deadline_s, response_s=response, local=local)
            if local:
                ev.latency_local_s = response
            else:
                ev.latency_comm_s = (task.tx_done_stamp - task.born_interval) * dt
                ev.latency_edge_s = (task.finish_stamp - task.tx_done_stamp) * dt
            latency = response
        else:
            ev = FinishEvent(
                interval=t, ied=task.owner, task_id=task.task_id, kind=EV_DROP,
                deadline_s=task.deadline_s, response_s=None,
                local=task.assigned_es is None)
            latency = None
        self.ledger.note_finish(ev)
        self.ledger.note_event(TaskEvent(
            interval=t, ied=task.owner, task_id=task.task_id,
            kind=EV_DONE if kind == EV_DONE else EV_DROP,
            latency_s=latency, es=task.assigned_es))

    # -- per-interval operations ------------------------------------------

    def update_channel_gains(self, t: int) -> None:
        """Redraw fast fading and renormalize to a unit mean over all links.

        Raw gain is pathloss times an exponentially distributed (unit
        mean) fade; the stored gain is normalized by the mean over every
        (IED, ES) pair this interval, so mean(gains) == 1 always.
        """
        if self.config.fading:
            h = self.rng_fade.standard_exponential(size=self.pathloss.shape)
            g = self.pathloss * h
        else:
            g = self.pathloss
        self.gains = g / g.mean()

    def spawn_tasks(self, t: int) -> list[Task]:
        """Bernoulli arrival per device; fresh tasks await routing."""
        cfg = self.config
        spawned = []
        if self.pending:
            # Unrouted leftovers indicate a driver bug; drop them loudly.
            self._warn("pending_overwritten")
            self.pending.clear()
        for i in range(cfg.num_ieds):
            if self.rng_spawn.random() >= cfg.task_prob:
                continue
            task = Task(
                task_id=self.next_task_id, owner=i, born_interval=t,
                size_mb=self.rng_fields.uniform(*cfg.size_range_mb),
                density_gc_mb=self.rng_fields.uniform(*cfg.density_range),
                deadline_s=self.rng_fields.uniform(*cfg.deadline_range_s))
            self.next_task_id += 1
            self.pending[i] = task
            self.in_flight += 1
            self.ledger.note_generated(t)
            self.ledger.note_event(TaskEvent(
                interval=t, ied=i, task_id=task.task_id, kind=EV_GEN))
            spawned.append(task)
        return spawned

    def apply_actions(self, actions) -> None:
        """Route every pending task: 0 = local, k >= 1 = edge server k - 1."""
        cfg = self.config
        if len(actions) != cfg.num_ieds:
            raise ProtocolError(
                f"expected {cfg.num_ieds} actions, got {len(actions)}")
        t = self.t
        for i in range(cfg.num_ieds):
            a = actions[i]
            task = self.pending.get(i)
            if task is None:
                if a is not None:
                    self._warn("action_without_task")
                continue
            if a is None:
                raise ProtocolError(f"IED {i} generated a task but got no action")
            a = int(a)
            if a < 0 or a > cfg.num_ess:
                raise ProtocolError(
                    f"action {a} out of range 0..{cfg.num_ess} for IED {i}")
            del self.pending[i]
            if a == 0:
                q = self.local_queues[i]
                width = service_width_intervals(
                    task.size_mb, task.density_gc_mb,
                    self.ied_gpu_hz[i], cfg.interval_s)
                stamp = local_completion_interval(q.tau_hat, t, width)
                q.tau_hat = stamp
                task.local_finish_stamp = stamp
                task.status = QUEUED_LOCAL
                q.tasks.append(task)
                self.ledger.note_event(TaskEvent(
                    interval=t, ied=i, task_id=task.task_id, kind=EV_ROUTE_LOCAL))
            else:
                m = a - 1
                task.assigned_es = m
                task.remaining_tx_mb = task.size_mb
                task.status = TRANSMITTING
                q = self.comm_queues[i][m]
                q.tasks.append(task)
                q.backlog_mb += task.size_mb
                self.ledger.note_event(TaskEvent(
                    interval=t, ied=i, task_id=task.task_id,
                    kind=EV_ROUTE_ES, es=m))

    def step_comm_queues(self, t: int) -> list[EdgeArrival]:
        """Drain every valid uplink queue at its equal-share Shannon rate."""
        cfg = self.config
        valid = [q for row in self.comm_queues for q in row if q.backlog_mb > 0.0]
        share = equal_share_hz(cfg.bandwidth_hz, len(valid)) if valid else 0.0
        self.ledger.note_bandwidth(t, len(valid), share)
        arrivals: list[EdgeArrival] = []
        if not valid:
            return arrivals
        for q in valid:
            snr = cfg.tx_power_w * self.gains[q.ied, q.es] / cfg.noise_power
            rate = share * np.log2(1.0 + snr)
            pool = rate * cfg.interval_s / BITS_PER_MB
            q.backlog_mb = max(0.0, q.backlog_mb - pool)
            while pool > 0.0 and q.tasks:
                head = q.tasks[0]
                take = min(head.remaining_tx_mb, pool)
                head.remaining_tx_mb -= take
                pool -= take
                if head.remaining_tx_mb > 0.0:
                    break
                q.tasks.pop(0)
                head.tx_done_stamp = t + 1
                self.ledger.note_event(TaskEvent(
                    interval=t, ied=head.owner, task_id=head.task_id,
                    kind=EV_TX_DONE, es=head.assigned_es))
                arrivals.append(self.admit_edge_task(head, head.assigned_es, t))
            if not q.tasks:
                # An empty FIFO holds exactly zero backlog; this pins down
                # ulp dust between the scalar chain and per-task remainders.
                q.backlog_mb = 0.0
        return arrivals

    def admit_edge_task(self, task: Task, es: int, t: int) -> EdgeArrival:
        """Enqueue a fully transmitted task at its edge server."""
        task.status = QUEUED_EDGE
        task.remaining_compute_mb = task.size_mb
        q = self.edge_queues[es][task.owner]
        q.tasks.append(task)
        q.backlog_mb += task.size_mb
        return EdgeArrival(interval=t, ied=task.owner, es=es, task=task)

    def step_edge_queues(self, t: int) -> list[Task]:
        """Fair-share compute drain per server across its valid queues.

        Each valid queue's MB quantum is sized by the head-of-line task's
        density and applied FIFO, so the backlog follows
        q(t) = max(0, q(t-1) + arrivals - F*dt / (|V|*e_head)).
        """
        cfg = self.config
        completions: list[Task] = []
        for m in range(cfg.num_ess):
            valid = [q for q in self.edge_queues[m] if q.backlog_mb > 0.0]
            if not valid:
                continue
            cap_gc = self.es_gpu_hz[m] * cfg.interval_s / 1e9
            for q in valid:
                head_density = q.tasks[0].density_gc_mb
                pool = cap_gc / (len(valid) * head_density)
                q.backlog_mb = max(0.0, q.backlog_mb - pool)
                while pool > 0.0 and q.tasks:
                    head = q.tasks[0]
                    take = min(head.remaining_compute_mb, pool)
                    head.remaining_compute_mb -= take
                    pool -= take
                    if head.remaining_compute_mb > 0.0:
                        break
                    q.tasks.pop(0)
                    head.finish_stamp = t + 1
                    completions.append(head)
                    if self._expired(head, t):
                        # Deadline fell inside this interval: too late.
                        self._finish(head, t, EV_DROP)
                    else:
                        self._finish(head, t, EV_DONE)
                if not q.tasks:
                    q.backlog_mb = 0.0
        return completions

    def step_local_queues(self, t: int) -> list[Task]:
        """Collect local tasks whose precomputed stamp lands this interval."""
        finished: list[Task] = []
        for q in self.local_queues:
            while q.tasks and q.tasks[0].local_finish_stamp == t + 1:
                task = q.tasks.pop(0)
                task.finish_stamp = task.local_finish_stamp
                finished.append(task)
                if self._expired(task, t):
                    self._finish(task, t, EV_DROP)
                else:
                    self._finish(task, t, EV_DONE)
        return finished

    def enforce_deadlines(self, t: int) -> list[Task]:
        """Drop every in-flight task whose deadline has now passed."""
        dropped: list[Task] = []
        for i, task in sorted(self.pending.items()):
            if self._expired(task, t):
                del self.pending[i]
                dropped.append(task)
                self._finish(task, t, EV_DROP)
        for q in self.local_queues:
            keep = []
            for task in q.tasks:
                if self._expired(task, t):
                    dropped.append(task)
                    self._finish(task, t, EV_DROP)
                else:
                    keep.append(task)
            q.tasks = keep
        for row in self.comm_queues:
            for q in row:
                keep = []
                for task in q.tasks:
                    if self._expired(task, t):
                        q.backlog_mb -= task.remaining_tx_mb
                        dropped.append(task)
                        self._finish(task, t, EV_DROP)
                    else:
                        keep.append(task)
                q.tasks = keep
                if not q.tasks:
                    q.backlog_mb = 0.0
        for row in self.edge_queues:
            for q in row:
                keep = []
                for task in q.tasks:
                    if self._expired(task, t):
                        q.backlog_mb -= task.remaining_compute_mb
                        dropped.append(task)
                        self._finish(task, t, EV_DROP)
                    else:
                        keep.append(task)
                q.tasks = keep
                if not q.tasks:
                    q.backlog_mb = 0.0
        return dropped

    def finalize_interval(self, t: int) -> None:
        """Snapshot queue backlogs for next interval's observations."""
        cfg = self.config
        for i in range(cfg.num_ieds):
            for m in range(cfg.num_ess):
                self.prev_comm_backlog[i, m] = self.comm_queues[i][m].backlog_mb
                self.prev_edge_backlog[i, m] = self.edge_queues[m][i].backlog_mb
        self.ledger.close_interval(t, self.in_flight)
        self.t = t + 1

    # -- introspection ------------------------------------------------------

    def comm_backlog_matrix(self) -> np.ndarray:
        out = np.zeros((self.config.num_ieds, self.config.num_ess))
        for i, row in enumerate(self.comm_queues):
            for m, q in enumerate(row):
                out[i, m] = q.backlog_mb
        return out

    def edge_backlog_matrix(self) -> np.ndarray:
        out = np.zeros((self.config.num_ieds, self.config.num_ess))
        for m, row in enumerate(self.edge_queues):
            for i, q in enumerate(row):
                out[i, m] = q.backlog_mb
        return out

    def state_digest(self) -> bytes:
        """Stable digest of the constructed state, for determinism checks."""
        import hashlib
        h = hashlib.sha256()
        for arr in (self.ied_pos, self.es_pos, self.ied_gpu_hz, self.es_gpu_hz,
                    self.pathloss, self.gains):
            h.update(np.ascontiguousarray(arr).tobytes())
        h.update(str(self.rng_spawn.bit_generator.state).encode())
        h.update(str(self.rng_fields.bit_generator.state).encode())
        h.update(str(self.rng_fade.bit_generator.state).encode())
        return h.digest()


def new_system(config: SystemConfig, seed: int | None = None) -> SystemState:
    """Build a validated system at clock zero with empty queues."""
    return SystemState(config, seed=seed)
