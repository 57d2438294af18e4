"""Resource-selection policies: which PU receives a selected task.

Three baselines (shortest execution, random feasible, latest feasible) and
the suitability-based selector, which scores every feasible PU by

    score = est_completion + alpha * time_margin + sign * beta * load_factor

and takes the maximum.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .model import EdgeServer, Link, ProcessingUnit, PuId, Task
from .timing import estimate_completion_on, link_delay


class RspKind(str, enum.Enum):
    SHORTEST = "shortest"
    RANDOM = "random"
    LATEST = "latest"
    SARS = "sars"


BASELINES = (RspKind.SHORTEST, RspKind.RANDOM, RspKind.LATEST)


class Outcome(enum.Enum):
    ASSIGN = "assign"
    ESCALATE = "escalate"
    INVALID = "invalid"


@dataclass(frozen=True)
class RspPolicy:
    kind: RspKind = RspKind.SARS
    alpha: float = 1.0
    beta: float = 0.5
    beta_sign: int = 1
    pora_enabled: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", RspKind(self.kind))
        if not 0 <= self.alpha <= 10:
            raise ValueError(f"alpha {self.alpha} outside [0, 10]")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        if self.beta_sign not in (1, -1):
            raise ValueError("beta_sign must be +1 or -1")
        if self.pora_enabled and self.kind is not RspKind.SARS:
            raise ValueError("reserved-PU escalation is only available with sars")


@dataclass(frozen=True)
class SuitabilityRow:
    pu: PuId
    est_completion: float
    time_margin: float
    load_factor: float
    score: float

    @property
    def feasible(self) -> bool:
        return self.time_margin >= 0


@dataclass(frozen=True)
class Selection:
    outcome: Outcome
    pu: Optional[PuId] = None
    est_completion: Optional[float] = None


INVALID = Selection(Outcome.INVALID)
ESCALATE = Selection(Outcome.ESCALATE)


def time_margin(task: Task, est_completion: float) -> float:
    return task.deadline - est_completion


def max_load(pus: Iterable[ProcessingUnit]) -> float:
    return max((pu.committed_load for pu in pus if not pu.reserved), default=0.0)


def load_factor(pu: ProcessingUnit, all_pus: Iterable[ProcessingUnit]) -> float:
    """Committed load relative to the busiest non-reserved PU; 0 when all are idle."""
    peak = max_load(all_pus)
    if peak <= 0:
        return 0.0
    return pu.committed_load / peak


def suitability_score(est_completion: float, margin: float, lf: float, alpha: float, beta: float, beta_sign: int = 1) -> float:
    return est_completion + alpha * margin + beta_sign * beta * lf


def candidates(task: Task, servers: Sequence[EdgeServer], now: float) -> list[tuple[ProcessingUnit, float]]:
    """(pu, estimated completion) for every non-reserved PU, in PU-id order."""
    arrival = task.broker_arrival if task.broker_arrival is not None else now
    out = []
    for server in servers:
        leg = link_delay(task.file_size, Link(server.broker_distance, server.broker_bandwidth))
        for pu in server.pus:
            if not pu.reserved:
                out.append((pu, estimate_completion_on(task, pu, now, arrival, leg)))
    return out


def suitability_rows(task: Task, servers: Sequence[EdgeServer], now: float, alpha: float, beta: float, beta_sign: int = 1) -> list[SuitabilityRow]:
    evaluated = candidates(task, servers, now)
    peak = max((pu.committed_load for pu, _ in evaluated), default=0.0)
    rows = []
    for pu, est in evaluated:
        lf = pu.committed_load / peak if peak > 0 else 0.0
        tm = time_margin(task, est)
        rows.append(SuitabilityRow(pu.id, est, tm, lf, suitability_score(est, tm, lf, alpha, beta, beta_sign)))
    return rows


def select_pu(
    policy: RspPolicy,
    task: Task,
    servers: Sequence[EdgeServer],
    now: float,
    rng: Optional[np.random.Generator] = None,
) -> Selection:
    kind = policy.kind
    if kind is RspKind.SARS:
        rows = [r for r in suitability_rows(task, servers, now, policy.alpha, policy.beta, policy.beta_sign) if r.feasible]
        if not rows:
            return ESCALATE if policy.pora_enabled else INVALID
        best = min(rows, key=lambda r: (-r.score, r.est_completion, r.pu))
        return Selection(Outcome.ASSIGN, best.pu, best.est_completion)

    evaluated = [(pu.id, est) for pu, est in candidates(task, servers, now)]
    if kind is RspKind.SHORTEST:
        if not evaluated:
            return INVALID
        pu, est = min(evaluated, key=lambda c: (c[1], c[0]))
        return Selection(Outcome.ASSIGN, pu, est) if est <= task.deadline else INVALID

    feasible = [c for c in evaluated if c[1] <= task.deadline]
    if not feasible:
        return INVALID
    if kind is RspKind.RANDOM:
        if rng is None:
            raise ValueError("random selection needs an rng")
        pu, est = feasible[int(rng.integers(len(feasible)))]
    else:
        pu, est = min(feasible, key=lambda c: (-c[1], c[0]))
    return Selection(Outcome.ASSIGN, pu, est)
