"""Episode ledger, per-interval metrics, and the latency objective."""

from __future__ import annotations

from dataclasses import dataclass, field

from .tasks import EV_DONE, EV_DROP, FinishEvent, TaskEvent


@dataclass
class IntervalMetrics:
    """Aggregates for one interval, derived from the ledger."""

    interval: int
    tasks_generated: int
    tasks_completed: int
    tasks_dropped: int
    sum_latency_s: float
    objective_term_s: float
    in_flight_end: int
    bandwidth_valid: int
    bandwidth_share_hz: float
    finishes: list[FinishEvent] = field(default_factory=list)


@dataclass
class EpisodeLedger:
    """Every event of one episode, enough to audit it independently."""

    events: list[TaskEvent] = field(default_factory=list)
    finishes: list[FinishEvent] = field(default_factory=list)
    generated_per_interval: dict[int, int] = field(default_factory=dict)
    finishes_per_interval: dict[int, list[FinishEvent]] = field(default_factory=dict)
    bandwidth_per_interval: dict[int, tuple[int, float]] = field(default_factory=dict)
    in_flight_per_interval: dict[int, int] = field(default_factory=dict)
    closed_intervals: list[int] = field(default_factory=list)
    generated: int = 0
    completed: int = 0
    dropped: int = 0

    def note_event(self, event: TaskEvent) -> None:
        self.events.append(event)

    def note_generated(self, interval: int) -> None:
        self.generated += 1
        self.generated_per_interval[interval] = (
            self.generated_per_interval.get(interval, 0) + 1)

    def note_finish(self, ev: FinishEvent) -> None:
        self.finishes.append(ev)
        self.finishes_per_interval.setdefault(ev.interval, []).append(ev)
        if ev.kind == EV_DONE:
            self.completed += 1
        else:
            self.dropped += 1

    def note_bandwidth(self, interval: int, n_valid: int, share_hz: float) -> None:
        self.bandwidth_per_interval[interval] = (n_valid, share_hz)

    def close_interval(self, interval: int, in_flight: int) -> None:
        self.in_flight_per_interval[interval] = in_flight
        self.closed_intervals.append(interval)

    def finishes_at(self, interval: int) -> list[FinishEvent]:
        return self.finishes_per_interval.get(interval, [])


def finish_cost_s(ev: FinishEvent, drop_penalty_s: float) -> float:
    """Latency this task contributes to the objective."""
    if ev.kind == EV_DONE:
        return ev.response_s
    return ev.deadline_s + drop_penalty_s


def objective_value(ledger: EpisodeLedger, drop_penalty_s: float) -> float:
    """Total weighted latency over the episode.

    Completed local tasks contribute their local latency, completed
    offloaded tasks their communication plus edge-compute latency, and
    dropped tasks their deadline plus the drop penalty.
    """
    return sum(finish_cost_s(ev, drop_penalty_s) for ev in ledger.finishes)


def build_interval_metrics(ledger: EpisodeLedger,
                           drop_penalty_s: float) -> list[IntervalMetrics]:
    rows = []
    for t in ledger.closed_intervals:
        fins = ledger.finishes_at(t)
        done = [ev for ev in fins if ev.kind == EV_DONE]
        drop = [ev for ev in fins if ev.kind == EV_DROP]
        n_valid, share = ledger.bandwidth_per_interval.get(t, (0, 0.0))
        rows.append(IntervalMetrics(
            interval=t,
            tasks_generated=ledger.generated_per_interval.get(t, 0),
            tasks_completed=len(done),
            tasks_dropped=len(drop),
            sum_latency_s=sum(ev.response_s for ev in done),
            objective_term_s=sum(finish_cost_s(ev, drop_penalty_s) for ev in fins),
            in_flight_end=ledger.in_flight_per_interval[t],
            bandwidth_valid=n_valid,
            bandwidth_share_hz=share,
            finishes=list(fins),
        ))
    return rows


def conservation_ok(ledger: EpisodeLedger) -> bool:
    """Exact per-interval accounting: generated = finished + in flight."""
    gen = 0
    fin = 0
    for t in ledger.closed_intervals:
        gen += ledger.generated_per_interval.get(t, 0)
        fin += len(ledger.finishes_at(t))
        if gen != fin + ledger.in_flight_per_interval[t]:
            return False
    return True


def average_latency_s(ledger: EpisodeLedger, drop_penalty_s: float) -> float:
    """Mean per-task cost: completions at their latency, drops at d + penalty."""
    n = ledger.completed + ledger.dropped
    if n == 0:
        return 0.0
    return objective_value(ledger, drop_penalty_s) / n


def completion_rate(ledger: EpisodeLedger) -> float:
    """Completed over generated; defined as 1.0 when nothing was generated."""
    if ledger.generated == 0:
        return 1.0
    return ledger.completed / ledger.generated
