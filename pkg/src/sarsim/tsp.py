"""Task-selection policies: orderings of the broker's waiting queue."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from .model import Task, TaskState


class TspKind(str, enum.Enum):
    FCFS = "fcfs"
    EDF = "edf"
    EDD = "edd"
    EFDF = "efdf"
    CR = "cr"
    COVERT = "covert"
    ERA = "era"
    PQM = "pqm"


CLASSICAL = (TspKind.FCFS, TspKind.EDF, TspKind.EDD, TspKind.EFDF, TspKind.CR, TspKind.COVERT)
PRIORITY_BASED = (TspKind.ERA, TspKind.PQM)

DEFAULT_PARAMS = {
    TspKind.COVERT: {"k": 2.0},
    TspKind.ERA: {"high": 1.5, "medium": 3.0},
    TspKind.PQM: {"critical": 2.0},
}


@dataclass(frozen=True)
class QueueView:
    now: float
    tasks: Sequence[Task]
    max_rate: float  # fastest PU rate in the system

    def __post_init__(self):
        for t in self.tasks:
            if t.state is not TaskState.QUEUED or t.broker_arrival is None:
                raise ValueError(f"task {t.id} is not queued at the broker")
        if not self.max_rate > 0:
            raise ValueError("max_rate must be positive")

    def best_case(self, task: Task) -> float:
        return task.workload / self.max_rate

    def slack(self, task: Task) -> float:
        return task.deadline - self.now - self.best_case(task)


@dataclass
class TspPolicy:
    kind: TspKind
    params: dict = field(default_factory=dict)
    _frozen_deadline: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.kind = TspKind(self.kind)
        allowed = DEFAULT_PARAMS.get(self.kind, {})
        unknown = set(self.params) - set(allowed)
        if unknown:
            raise ValueError(f"{self.kind.value}: unknown parameters {sorted(unknown)}")
        self.params = {**allowed, **self.params}
        if self.kind is TspKind.COVERT and not self.params["k"] > 0:
            raise ValueError("covert look-ahead k must be positive")
        if self.kind is TspKind.ERA and not 0 < self.params["high"] <= self.params["medium"]:
            raise ValueError("era thresholds must satisfy 0 < high <= medium")
        if self.kind is TspKind.PQM and self.params["critical"] < 0:
            raise ValueError("pqm critical threshold must be >= 0")

    def key(self, task: Task, view: QueueView) -> tuple:
        kind = self.kind
        tie = (task.broker_arrival, task.id)
        if kind is TspKind.FCFS:
            return tie
        if kind is TspKind.EDF:
            return (task.deadline, *tie)
        if kind is TspKind.EDD:
            return (self._frozen_deadline.setdefault(task.id, task.deadline), *tie)
        if kind is TspKind.EFDF:
            return (not is_feasible(task, view), task.deadline, *tie)
        if kind is TspKind.CR:
            return (critical_ratio(task, view), *tie)
        if kind is TspKind.COVERT:
            return (-covert_index(task, view, self.params["k"]), *tie)
        if kind is TspKind.ERA:
            return (era_bucket(task, view, self.params["high"], self.params["medium"]), *tie)
        if kind is TspKind.PQM:
            return (0 if pqm_critical(task, view, self.params["critical"]) else 1, *tie)
        raise AssertionError(kind)


def is_feasible(task: Task, view: QueueView) -> bool:
    return view.now + view.best_case(task) <= task.deadline


def critical_ratio(task: Task, view: QueueView) -> float:
    return (task.deadline - view.now) / view.best_case(task)


def covert_index(task: Task, view: QueueView, k: float) -> float:
    """Expected lateness cost per unit of processing time."""
    p = view.best_case(task)
    slack = max(0.0, task.deadline - view.now - p)
    return max(0.0, 1.0 - slack / (k * p)) / p


def era_bucket(task: Task, view: QueueView, high: float, medium: float) -> int:
    ratio = view.slack(task) / view.best_case(task)
    if ratio < high:
        return 0
    if ratio < medium:
        return 1
    return 2


def pqm_critical(task: Task, view: QueueView, threshold: float) -> bool:
    return view.slack(task) <= threshold * view.best_case(task)


def order_queue(policy: TspPolicy, view: QueueView) -> list[int]:
    """Queued task ids, highest priority first; ties by (broker arrival, id)."""
    ranked = sorted(view.tasks, key=lambda t: policy.key(t, view))
    return [t.id for t in ranked]


def infeasible_ids(view: QueueView) -> list[int]:
    """Tasks that even the fastest PU cannot finish in time (EFDF's flagged tail)."""
    return [t.id for t in view.tasks if not is_feasible(t, view)]
