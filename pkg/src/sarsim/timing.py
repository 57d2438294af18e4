"""Delay and completion-time arithmetic shared by the engine and the policies."""

from __future__ import annotations

from dataclasses import dataclass

from .model import Link, ProcessingUnit, Task


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class DelayBreakdown:
    transmission: float
    broker_queue: float
    processing: float

    def __post_init__(self):
        if min(self.transmission, self.broker_queue, self.processing) < 0:
            raise DomainError(f"negative delay component in {self}")


def link_delay(file_size: float, link: Link) -> float:
    """One hop: size / bandwidth * distance."""
    if not link.bandwidth > 0:
        raise DomainError(f"nonpositive bandwidth {link.bandwidth}")
    return file_size / link.bandwidth * link.distance


def transmission_delay(task: Task, vehicle_link: Link, broker_link: Link) -> float:
    return link_delay(task.file_size, vehicle_link) + link_delay(task.file_size, broker_link)


def processing_delay(workload: float, rate: float) -> float:
    if not rate > 0:
        raise DomainError(f"nonpositive rate {rate}")
    return workload / rate


def completion_time(task: Task, delays: DelayBreakdown) -> float:
    return task.release + delays.transmission + delays.broker_queue + delays.processing


def estimate_completion_on(
    task: Task,
    pu: ProcessingUnit,
    now: float,
    broker_arrival: float,
    link_delay: float = 0.0,
) -> float:
    """Estimated completion of ``task`` if committed to ``pu`` at ``now``.

    The task reaches the PU's server ``link_delay`` after leaving the broker
    and then waits behind everything already committed to the PU. The
    implied queueing delay is ``start - broker_arrival - link_delay``.
    """
    start = max(now + link_delay, pu.busy_until)
    return start + processing_delay(task.workload, pu.rate)
