"""Seeded generation of the four real-time task groups."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from itertools import groupby
from typing import Iterable, Iterator

from . import rng as rngmod
from .model import RESOLUTION, SimulationClock, Task, quantize

WORKLOAD_STEP = 0.1
CSV_COLUMNS = ("id", "vehicle", "group", "release", "deadline", "workload", "size")


@dataclass(frozen=True)
class GroupSpec:
    group: int
    release_range: tuple[float, float]
    deadline_slack_range: tuple[float, float]
    workload_range: tuple[float, float] = (1.0, 10.0)
    size_range: tuple[float, float] = (1.0, 5.0)
    count: int = 200

    def __post_init__(self):
        for name in ("release_range", "deadline_slack_range", "workload_range", "size_range"):
            lo, hi = getattr(self, name)
            if not 0 <= lo <= hi:
                raise ValueError(f"group {self.group}: {name} must satisfy 0 <= lo <= hi")
        if self.workload_range[0] <= 0 or self.size_range[0] <= 0:
            raise ValueError(f"group {self.group}: workload and size ranges must be positive")
        if self.count <= 0:
            raise ValueError(f"group {self.group}: count must be positive")


def default_groups() -> list[GroupSpec]:
    """Table of group settings used in the reference experiment."""
    return [
        GroupSpec(1, (0, 40), (1, 10)),
        GroupSpec(2, (0, 70), (1, 10)),
        GroupSpec(3, (0, 40), (1, 20)),
        GroupSpec(4, (0, 70), (1, 20)),
    ]


@dataclass
class WorkloadPlan:
    groups: list[GroupSpec] = field(default_factory=default_groups)
    seed: int = 0
    n_vehicles: int = 4  # tasks go round-robin by id over vehicles

    @property
    def total(self) -> int:
        return sum(g.count for g in self.groups)


def _uniform(gen, lo: float, hi: float, step: float) -> float:
    value = quantize(gen.uniform(lo, hi), step)
    return min(max(value, lo), hi)


def generate(plan: WorkloadPlan) -> list[Task]:
    """Draw every group's tasks, then order them by release.

    Per group (own stream), per task, draws happen in the order release,
    workload, size, slack. Ids are assigned group by group before the
    stable sort by release, so equal releases keep id order.
    """
    drafts = []
    for spec in plan.groups:
        gen = rngmod.stream(plan.seed, rngmod.GROUP_BASE + spec.group)
        for _ in range(spec.count):
            release = _uniform(gen, *spec.release_range, RESOLUTION)
            workload = _uniform(gen, *spec.workload_range, WORKLOAD_STEP)
            size = _uniform(gen, *spec.size_range, RESOLUTION)
            slack = _uniform(gen, *spec.deadline_slack_range, RESOLUTION)
            drafts.append((spec.group, release, workload, size, slack))
    tasks = []
    for i, (group, release, workload, size, slack) in enumerate(drafts):
        tasks.append(
            Task(
                id=i,
                vehicle_id=i % plan.n_vehicles,
                group=group,
                release=release,
                deadline=release + workload + slack,
                workload=workload,
                file_size=size,
                slack=slack,
            )
        )
    tasks.sort(key=lambda t: t.release)
    return tasks


def release_events(tasks: Iterable[Task], clock: SimulationClock | None = None) -> Iterator[tuple[float, list[Task]]]:
    """Yield ``(tick, tasks)`` for every tick at which some task is released.

    A task is released at the first tick boundary not earlier than its
    release time.
    """
    tick = clock.tick if clock is not None else 1.0
    tasks = list(tasks)
    prev = None
    for t in tasks:
        if prev is not None and t.release < prev:
            raise ValueError("tasks must be sorted by release")
        prev = t.release
    for when, batch in groupby(tasks, key=lambda t: release_tick(t.release, tick)):
        yield when, list(batch)


def release_tick(time: float, tick: float = 1.0) -> float:
    """First tick boundary >= ``time`` (tolerant to float noise at RESOLUTION)."""
    n = int(-(-round(time / tick, 6) // 1))
    return n * tick


def write_csv(tasks: Iterable[Task], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for t in tasks:
            writer.writerow([t.id, t.vehicle_id, t.group, repr(t.release), repr(t.deadline), repr(t.workload), repr(t.file_size)])


def read_csv(path) -> list[Task]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{path}: expected columns {','.join(CSV_COLUMNS)}")
        tasks = [
            Task(
                id=int(row["id"]),
                vehicle_id=int(row["vehicle"]),
                group=int(row["group"]),
                release=float(row["release"]),
                deadline=float(row["deadline"]),
                workload=float(row["workload"]),
                file_size=float(row["size"]),
            )
            for row in reader
        ]
    tasks.sort(key=lambda t: t.release)
    return tasks
