"""Tick-driven discrete-event loop for broker-based task offloading.

Each tick the broker releases tasks, admits those whose uplink transfer has
finished, orders its queue with the task-selection policy and then asks the
resource-selection policy for a PU for every queued task in that order.
Assignment commits the task to the PU's FIFO; execution is non-preemptive,
so start and completion are fixed at commit time.
"""

from __future__ import annotations

import copy
import enum
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from . import rng as rngmod
from .model import (
    EdgeServer,
    Link,
    ProcessingUnit,
    PuId,
    Task,
    TaskState,
    Topology,
    validate_topology,
)
from .pora import ReservationState, dispatch_urgent, release_reserved, reserve
from .rsp import Outcome, RspPolicy, select_pu
from .timing import DelayBreakdown, completion_time, link_delay, processing_delay
from .tsp import QueueView, TspPolicy, order_queue
from .workload import WorkloadPlan, generate, release_tick

EPS = 1e-9


class EventKind(str, enum.Enum):
    RELEASED = "TaskReleased"
    BROKER_ARRIVAL = "BrokerArrival"
    ASSIGNED = "Assigned"
    STARTED = "Started"
    COMPLETED = "Completed"
    INVALID = "MarkedInvalid"
    PORA_DISPATCHED = "PoraDispatched"
    PORA_RELEASED = "PoraReleased"


TERMINAL_EVENTS = (EventKind.COMPLETED, EventKind.INVALID)


class InvalidReason(str, enum.Enum):
    NO_FEASIBLE_PU = "no-feasible-pu"
    NO_RESERVED_PU = "no-reserved-pu"
    ARRIVAL_INFEASIBLE = "arrival-infeasible"


class InvariantViolation(AssertionError):
    pass


@dataclass(frozen=True)
class Event:
    time: float
    kind: EventKind
    task_id: int
    pu: Optional[PuId] = None

    def to_json(self) -> str:
        pu = list(self.pu) if self.pu is not None else None
        return json.dumps({"time": self.time, "kind": self.kind.value, "task": self.task_id, "pu": pu}, separators=(",", ":"))


@dataclass(frozen=True)
class Commit:
    task_id: int
    pu: PuId
    assigned: float
    ready: float  # arrival at the PU's server
    start: float
    end: float
    via_pora: bool


@dataclass
class PoraSettings:
    reserve: bool = False
    k: int = 3


@dataclass
class EngineConfig:
    topology: Topology
    workload: Union[WorkloadPlan, Sequence[Task]]
    tsp: TspPolicy
    rsp: RspPolicy
    pora: PoraSettings = field(default_factory=PoraSettings)
    seed: int = 0
    tick: float = 1.0
    screen_infeasible: bool = True  # per-tick best-case invalidation
    debug: bool = False

    def validate(self) -> None:
        validate_topology(self.topology)
        if not self.tick > 0:
            raise ValueError("tick must be positive")
        if self.rsp.pora_enabled and not self.pora.reserve:
            raise ValueError("escalation to reserved PUs requires pora.reserve")


@dataclass
class SimulationReport:
    tasks: list[Task]  # by id, terminal
    events: list[Event]
    commits: dict[int, Commit]
    delays: dict[int, DelayBreakdown]
    invalid_reasons: dict[int, InvalidReason]
    reserved: list[PuId]
    pu_rates: dict[PuId, float]
    label: dict

    def trace_lines(self) -> list[str]:
        return [e.to_json() for e in self.events]

    def write_trace(self, path) -> None:
        with open(path, "w") as fh:
            for line in self.trace_lines():
                fh.write(line + "\n")


@dataclass(frozen=True)
class Snapshot:
    now: float
    servers: tuple[EdgeServer, ...]
    queue: tuple[Task, ...]

    def pool(self) -> list[ProcessingUnit]:
        return [pu for s in self.servers for pu in s.pus if not pu.reserved]


class Engine:
    def __init__(self, config: EngineConfig):
        config.validate()
        self.config = config
        self.topology = config.topology
        self.servers = copy.deepcopy(config.topology.servers)
        for pu in (pu for s in self.servers for pu in s.pus):
            pu.reserved = False
            pu.busy_until = 0.0
            pu.committed_load = 0.0
        if isinstance(config.workload, WorkloadPlan):
            tasks = generate(config.workload)
        else:
            tasks = sorted((t.copy() for t in config.workload), key=lambda t: t.release)
        for t in tasks:
            if t.state is not TaskState.GENERATED:
                raise ValueError(f"task {t.id} is not fresh")
            if not 0 <= t.vehicle_id < len(self.topology.vehicles):
                raise ValueError(f"task {t.id}: unknown vehicle {t.vehicle_id}")
        self.tasks = tasks
        self.by_id = {t.id: t for t in tasks}
        if len(self.by_id) != len(tasks):
            raise ValueError("duplicate task ids")
        self.tsp = copy.deepcopy(config.tsp)
        self.rsp = config.rsp
        self.rng = rngmod.stream(config.seed, rngmod.RSP)
        self.reservation: Optional[ReservationState] = None
        if config.pora.reserve:
            self.reservation = reserve(self.servers, config.pora.k, rngmod.stream(config.seed, rngmod.PORA))

        self.now = 0.0
        self.queue: list[Task] = []
        self.in_transit: list[Task] = []
        self.schedules: dict[PuId, list[Commit]] = {pu.id: [] for s in self.servers for pu in s.pus}
        self.commits: dict[int, Commit] = {}
        self.uplink: dict[int, float] = {}
        self.invalid_reasons: dict[int, InvalidReason] = {}
        self._events: list[tuple[float, int, Event]] = []
        self._seq = 0
        self._max_rate = max(pu.rate for s in self.servers for pu in s.pus if self._usable(pu))
        self._legs = [
            Link(s.broker_distance, s.broker_bandwidth) for s in self.servers
        ]

    # -- bookkeeping ---------------------------------------------------------

    def _emit(self, time: float, kind: EventKind, task_id: int, pu: Optional[PuId] = None) -> None:
        self._events.append((time, self._seq, Event(time, kind, task_id, pu)))
        self._seq += 1

    def _pu(self, pid: PuId) -> ProcessingUnit:
        return self.servers[pid[0]].pus[pid[1]]

    def _refresh_load(self, pu: ProcessingUnit) -> None:
        now = self.now
        pending = [c for c in self.schedules[pu.id] if c.end > now]
        pu.committed_load = sum(min(c.end - c.start, c.end - now) for c in pending)

    def snapshot(self, with_queue: bool = True) -> Snapshot:
        """Copy of the resource state; policies never touch engine internals."""
        servers = tuple(
            EdgeServer(s.id, [ProcessingUnit(**vars(pu)) for pu in s.pus], s.broker_distance, s.broker_bandwidth)
            for s in self.servers
        )
        queue = tuple(t.copy() for t in self.queue) if with_queue else ()
        return Snapshot(self.now, servers, queue)

    def _usable(self, pu: ProcessingUnit) -> bool:
        return not pu.reserved or self.rsp.pora_enabled

    def _best_case_finish(self, task: Task) -> float:
        """Lower bound on completion over every usable PU, standby ones included."""
        best = math.inf
        for server, leg in zip(self.servers, self._legs):
            ready = self.now + link_delay(task.file_size, leg)
            for pu in server.pus:
                if self._usable(pu):
                    best = min(best, ready + task.workload / pu.rate)
        return best

    def _invalidate(self, task: Task, reason: InvalidReason) -> None:
        task.advance(TaskState.INVALID)
        self.invalid_reasons[task.id] = reason
        self._emit(self.now, EventKind.INVALID, task.id)

    def _commit(self, task: Task, pid: PuId, via_pora: bool) -> Commit:
        pu = self._pu(pid)
        ready = self.now + link_delay(task.file_size, self._legs[pid[0]])
        start = max(ready, pu.busy_until)
        end = start + processing_delay(task.workload, pu.rate)
        commit = Commit(task.id, pid, self.now, ready, start, end, via_pora)
        self.schedules[pid].append(commit)
        self.commits[task.id] = commit
        pu.busy_until = end
        self._refresh_load(pu)
        task.advance(TaskState.ASSIGNED)
        task.assignment_time = self.now
        self._emit(self.now, EventKind.PORA_DISPATCHED if via_pora else EventKind.ASSIGNED, task.id, pid)
        return commit

    def _advance_execution(self, until: float) -> None:
        """Start/finish every committed task whose interval begins/ends by ``until``."""
        for pid, schedule in self.schedules.items():
            for c in schedule:
                task = self.by_id[c.task_id]
                if task.state is TaskState.ASSIGNED and c.start <= until:
                    task.advance(TaskState.RUNNING)
                    self._emit(c.start, EventKind.STARTED, task.id, pid)
                if task.state is TaskState.RUNNING and c.end <= until:
                    task.advance(TaskState.COMPLETED)
                    task.completion = c.end
                    self._emit(c.end, EventKind.COMPLETED, task.id, pid)
                    if c.via_pora:
                        release_reserved(self.reservation, pid)
                        self._emit(c.end, EventKind.PORA_RELEASED, task.id, pid)
        for s in self.servers:
            for pu in s.pus:
                self._refresh_load(pu)

    # -- main loop -----------------------------------------------------------

    def run(self) -> SimulationReport:
        tick = self.config.tick
        pending = list(self.tasks)
        cursor = 0
        self.now = release_tick(pending[0].release, tick) if pending else 0.0
        while cursor < len(pending) or self.in_transit or self.queue:
            now = self.now
            self._advance_execution(now)
            # (1) releases
            while cursor < len(pending) and release_tick(pending[cursor].release, tick) <= now:
                task = pending[cursor]
                cursor += 1
                task.advance(TaskState.IN_TRANSIT)
                self._emit(task.release, EventKind.RELEASED, task.id)
                up = link_delay(task.file_size, self.topology.uplink(task.vehicle_id))
                self.uplink[task.id] = up
                task.broker_arrival = task.release + up
                self.in_transit.append(task)
            # (2) broker arrivals
            still = []
            for task in self.in_transit:
                if release_tick(task.broker_arrival, tick) <= now:
                    task.advance(TaskState.QUEUED)
                    self._emit(task.broker_arrival, EventKind.BROKER_ARRIVAL, task.id)
                    self.queue.append(task)
                else:
                    still.append(task)
            self.in_transit = still
            self._screen()
            # (3) ordering, (4) selection
            if self.queue:
                view = QueueView(now, tuple(self.queue), self._max_rate)
                order = order_queue(self.tsp, view)
                for tid in order:
                    self._decide(self.by_id[tid])
                self.queue = [t for t in self.queue if t.state is TaskState.QUEUED]
            # (6) hopeless leftovers
            self._screen()
            if self.config.debug:
                self._check_tick()
            self.now = now + tick
        self._advance_execution(math.inf)
        return self._report()

    def _screen(self) -> None:
        if not self.config.screen_infeasible:
            return
        keep = []
        for task in self.queue:
            if self._best_case_finish(task) > task.deadline:
                self._invalidate(task, InvalidReason.ARRIVAL_INFEASIBLE)
            else:
                keep.append(task)
        self.queue = keep

    def _decide(self, task: Task) -> None:
        snap = self.snapshot(with_queue=False)
        choice = select_pu(self.rsp, task, snap.servers, self.now, self.rng)
        if choice.outcome is Outcome.ASSIGN:
            self._commit(task, choice.pu, via_pora=False)
        elif choice.outcome is Outcome.ESCALATE:
            hit = dispatch_urgent(self.reservation, task, self.servers, self.now)
            if hit is None:
                self._invalidate(task, InvalidReason.NO_RESERVED_PU)
            else:
                self._commit(task, hit[0], via_pora=True)
        else:
            self._invalidate(task, InvalidReason.NO_FEASIBLE_PU)

    def _check_tick(self) -> None:
        for pid, schedule in self.schedules.items():
            pu = self._pu(pid)
            expected = sum(min(c.end - c.start, c.end - self.now) for c in schedule if c.end > self.now)
            if abs(pu.committed_load - expected) > EPS:
                raise InvariantViolation(f"PU {pid}: committed_load {pu.committed_load} != {expected}")
            if pu.reserved:
                live = [c for c in schedule if c.end > self.now]
                if len(live) > 1 or any(not c.via_pora for c in schedule):
                    raise InvariantViolation(f"reserved PU {pid} carries non-urgent or multiple tasks")

    def _report(self) -> SimulationReport:
        delays = {}
        for tid, c in self.commits.items():
            task = self.by_id[tid]
            leg = c.ready - c.assigned
            delays[tid] = DelayBreakdown(
                transmission=self.uplink[tid] + leg,
                broker_queue=max(0.0, c.start - leg - task.broker_arrival),
                processing=c.end - c.start,
            )
        events = [e for _, _, e in sorted(self._events, key=lambda x: (x[0], x[1]))]
        label = {
            "tsp": self.tsp.kind.value,
            "rsp": self.rsp.kind.value,
            "pora": self.rsp.pora_enabled,
            "alpha": self.rsp.alpha,
            "beta": self.rsp.beta,
            "beta_sign": self.rsp.beta_sign,
            "seed": self.config.seed,
        }
        report = SimulationReport(
            tasks=sorted(self.tasks, key=lambda t: t.id),
            events=events,
            commits=dict(sorted(self.commits.items())),
            delays=dict(sorted(delays.items())),
            invalid_reasons=dict(sorted(self.invalid_reasons.items())),
            reserved=sorted(self.reservation.reserved.values()) if self.reservation else [],
            pu_rates={pu.id: pu.rate for s in self.servers for pu in s.pus},
            label=label,
        )
        if self.config.debug:
            problems = check_report(report)
            if problems:
                raise InvariantViolation("; ".join(problems[:10]))
        return report


def run(config: EngineConfig) -> SimulationReport:
    return Engine(config).run()


def check_report(report: SimulationReport, total: Optional[int] = None) -> list[str]:
    """Replay the finished run and list every violated invariant."""
    problems = []
    tasks = report.tasks
    if total is not None and len(tasks) != total:
        problems.append(f"expected {total} tasks, report has {len(tasks)}")
    done = [t for t in tasks if t.state is TaskState.COMPLETED]
    bad = [t for t in tasks if t.state not in (TaskState.COMPLETED, TaskState.INVALID)]
    if bad:
        problems.append(f"{len(bad)} tasks not terminal")
    if len(done) + len(report.invalid_reasons) != len(tasks):
        problems.append("completed + invalid != total")
    for t in done:
        if t.completion > t.deadline:
            problems.append(f"task {t.id} completed after its deadline")
        d = report.delays.get(t.id)
        if d is None:
            problems.append(f"task {t.id} completed without delay record")
            continue
        recomputed = completion_time(t, d)
        if abs(recomputed - t.completion) > EPS * max(1.0, abs(t.completion)):
            problems.append(f"task {t.id}: completion {t.completion} != {recomputed}")
        c = report.commits[t.id]
        if c.assigned + EPS < t.broker_arrival:
            problems.append(f"task {t.id} assigned before reaching the broker")
        expected = processing_delay(t.workload, report.pu_rates[c.pu])
        if abs((c.end - c.start) - expected) > EPS * max(1.0, expected):
            problems.append(f"task {t.id}: execution length {c.end - c.start} != {expected}")
    by_pu: dict = {}
    for c in report.commits.values():
        by_pu.setdefault(c.pu, []).append(c)
    reserved = set(report.reserved)
    for pid, commits in by_pu.items():
        commits.sort(key=lambda c: (c.start, c.end))
        for a, b in zip(commits, commits[1:]):
            if b.start < a.end - EPS:
                problems.append(f"PU {pid}: tasks {a.task_id} and {b.task_id} overlap")
        for c in commits:
            if c.via_pora != (pid in reserved):
                problems.append(f"PU {pid}: task {c.task_id} dispatched through the wrong path")
    terminal: dict = {}
    last = -math.inf
    for e in report.events:
        if e.time < last:
            problems.append("trace not time-ordered")
            break
        last = e.time
    for e in report.events:
        if e.kind in TERMINAL_EVENTS:
            terminal[e.task_id] = terminal.get(e.task_id, 0) + 1
    if any(n != 1 for n in terminal.values()) or len(terminal) != len(tasks):
        problems.append("some task lacks exactly one terminal event")
    return problems
