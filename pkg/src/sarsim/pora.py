"""Standby reservation of one near-average PU per server for urgent tasks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .model import ConfigurationError, EdgeServer, Link, ProcessingUnit, PuId, Task
from .timing import link_delay, processing_delay


@dataclass
class ReservationState:
    reserved: dict[int, PuId]  # server id -> reserved PU
    top_k: int
    in_use: set = field(default_factory=set)

    def __post_init__(self):
        if not self.in_use <= set(self.reserved.values()):
            raise ValueError("in_use must be a subset of the reserved PUs")


def mean_rate(server: EdgeServer) -> float:
    return sum(pu.rate for pu in server.pus) / len(server.pus)


def rate_deviations(server: EdgeServer) -> list[tuple[float, PuId]]:
    avg = mean_rate(server)
    return [(abs(pu.rate - avg), pu.id) for pu in server.pus]


# Deviations are compared at this resolution so that rates equidistant from
# the mean in decimal terms tie (and fall back to PU id) instead of being
# split by binary rounding noise.
DEVIATION_DIGITS = 9


def candidate_pool(server: EdgeServer, k: int) -> list[PuId]:
    """The ``k`` PUs whose rate is closest to the server mean (ties: lower id)."""
    ranked = sorted((round(d, DEVIATION_DIGITS), pid) for d, pid in rate_deviations(server))
    return [pid for _, pid in ranked[:k]]


def reserve(servers: Sequence[EdgeServer], k: int, rng: np.random.Generator) -> ReservationState:
    """Mark one PU per server as standby, drawn uniformly from its candidate pool."""
    if k < 1:
        raise ConfigurationError("pora", f"k must be >= 1, got {k}")
    for server in servers:
        if len(server.pus) <= k:
            raise ConfigurationError(f"server {server.id}", f"needs more than k={k} PUs for reservation")
    reserved = {}
    for server in servers:
        pool = candidate_pool(server, k)
        server_id, index = pool[int(rng.integers(len(pool)))]
        server.pus[index].reserved = True
        reserved[server.id] = (server_id, index)
    return ReservationState(reserved, k)


def dispatch_urgent(state: ReservationState, task: Task, servers: Sequence[EdgeServer], now: float) -> Optional[tuple[PuId, float]]:
    """Pick the free standby PU finishing ``task`` earliest within its deadline.

    Returns ``(pu id, estimated completion)`` and marks the PU in use, or
    ``None`` when no free standby PU can meet the deadline.
    """
    best = None
    for server in servers:
        pid = state.reserved.get(server.id)
        if pid is None or pid in state.in_use:
            continue
        pu: ProcessingUnit = server.pus[pid[1]]
        leg = link_delay(task.file_size, Link(server.broker_distance, server.broker_bandwidth))
        est = max(now + leg, pu.busy_until) + processing_delay(task.workload, pu.rate)
        if est <= task.deadline and (best is None or (est, pid) < best):
            best = (est, pid)
    if best is None:
        return None
    state.in_use.add(best[1])
    return best[1], best[0]


def release_reserved(state: ReservationState, pu: PuId) -> ReservationState:
    if pu not in state.in_use:
        raise ValueError(f"PU {pu} is not serving an urgent task")
    state.in_use.discard(pu)
    return state
