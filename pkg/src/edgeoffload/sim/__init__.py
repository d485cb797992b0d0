"""Discrete-time simulator of multi-device edge task offloading."""

from .metrics import (EpisodeLedger, IntervalMetrics, average_latency_s,
                      build_interval_metrics, completion_rate,
                      conservation_ok, finish_cost_s, objective_value)
from .system import (BITS_PER_MB, CommQueue, EdgeQueue, LocalQueue,
                     SystemState, local_completion_interval, new_system,
                     service_width_intervals)
from .tasks import (EV_DONE, EV_DROP, EV_GEN, EV_ROUTE_ES, EV_ROUTE_LOCAL,
                    EV_TX_DONE, EdgeArrival, FinishEvent, Task, TaskEvent)
from .trace import TRACE_COLUMNS, write_trace

__all__ = [
    "BITS_PER_MB", "CommQueue", "EdgeQueue", "EpisodeLedger", "EdgeArrival",
    "EV_DONE", "EV_DROP", "EV_GEN", "EV_ROUTE_ES", "EV_ROUTE_LOCAL",
    "EV_TX_DONE", "FinishEvent", "IntervalMetrics", "LocalQueue",
    "SystemState", "Task", "TaskEvent", "TRACE_COLUMNS",
    "average_latency_s", "build_interval_metrics", "completion_rate",
    "conservation_ok", "finish_cost_s", "local_completion_interval",
    "new_system", "objective_value", "service_width_intervals", "write_trace",
]
