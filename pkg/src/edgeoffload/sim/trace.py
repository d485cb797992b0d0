"""Delimited export of per-interval task events."""

from __future__ import annotations

import csv

from .tasks import TaskEvent

TRACE_COLUMNS = ("t", "ied", "task_id", "event", "es", "latency_s")


def format_float(x: float | None) -> str:
    if x is None:
        return ""
    return f"{x:.12g}"


def write_trace(events: list[TaskEvent], path: str) -> None:
    """One row per task lifecycle event, in emission order."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for ev in events:
            writer.writerow([
                ev.interval, ev.ied, ev.task_id, ev.kind,
                "" if ev.es is None else ev.es,
                format_float(ev.latency_s),
            ])
