"""Entities of the vehicle / RSU / broker / edge-server architecture."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

# Internal time resolution (time units). Generated attributes are quantized to it.
RESOLUTION = 0.001


def quantize(value: float, step: float = RESOLUTION) -> float:
    return round(round(value / step) * step, 9)


class ConfigurationError(ValueError):
    """A scenario or topology violates a structural rule."""

    def __init__(self, entity: str, rule: str):
        super().__init__(f"{entity}: {rule}")
        self.entity = entity
        self.rule = rule


class TaskState(enum.Enum):
    GENERATED = "Generated"
    IN_TRANSIT = "InTransit"
    QUEUED = "Queued"
    ASSIGNED = "Assigned"
    RUNNING = "Running"
    COMPLETED = "Completed"
    INVALID = "Invalid"


_NEXT_STATES = {
    TaskState.GENERATED: {TaskState.IN_TRANSIT},
    TaskState.IN_TRANSIT: {TaskState.QUEUED},
    TaskState.QUEUED: {TaskState.ASSIGNED, TaskState.INVALID},
    TaskState.ASSIGNED: {TaskState.RUNNING, TaskState.INVALID},
    TaskState.RUNNING: {TaskState.COMPLETED},
    TaskState.COMPLETED: set(),
    TaskState.INVALID: set(),
}

TERMINAL_STATES = frozenset({TaskState.COMPLETED, TaskState.INVALID})


@dataclass
class Task:
    id: int
    vehicle_id: int
    group: int
    release: float
    deadline: float
    workload: float  # MI
    file_size: float  # KB
    slack: Optional[float] = None  # drawn deadline slack, kept for verification
    state: TaskState = TaskState.GENERATED
    broker_arrival: Optional[float] = None
    assignment_time: Optional[float] = None
    completion: Optional[float] = None

    def __post_init__(self):
        if not self.deadline > self.release:
            raise ValueError(f"task {self.id}: deadline must exceed release")
        if self.workload <= 0 or self.file_size <= 0:
            raise ValueError(f"task {self.id}: workload and file size must be positive")
        if self.release < 0:
            raise ValueError(f"task {self.id}: negative release")

    def advance(self, state: TaskState) -> None:
        """Move to ``state``; raises on an illegal lifecycle transition."""
        if state not in _NEXT_STATES[self.state]:
            raise ValueError(f"task {self.id}: illegal transition {self.state.value} -> {state.value}")
        self.state = state

    @property
    def is_terminal(self) -> bool:
        return self.state in TERMINAL_STATES

    def copy(self) -> "Task":
        return Task(**{f: getattr(self, f) for f in self.__dataclass_fields__})


PuId = tuple  # (server index, pu index)


@dataclass
class ProcessingUnit:
    server: int
    index: int
    rate: float  # MI per time unit
    busy_until: float = 0.0
    committed_load: float = 0.0  # remaining committed processing time
    reserved: bool = False

    @property
    def id(self) -> PuId:
        return (self.server, self.index)


@dataclass
class EdgeServer:
    id: int
    pus: list[ProcessingUnit]
    broker_distance: float  # m
    broker_bandwidth: float


@dataclass(frozen=True)
class Vehicle:
    id: int
    rsu: int  # associated RSU


@dataclass(frozen=True)
class Rsu:
    id: int


@dataclass(frozen=True)
class Link:
    distance: float
    bandwidth: float


@dataclass
class Topology:
    vehicles: list[Vehicle]
    rsus: list[Rsu]
    vehicle_links: dict[tuple[int, int], Link]  # (vehicle, rsu) -> link
    servers: list[EdgeServer]
    distance_range: tuple[float, float] = (50.0, 250.0)

    def uplink(self, vehicle_id: int) -> Link:
        vehicle = self.vehicles[vehicle_id]
        return self.vehicle_links[(vehicle.id, vehicle.rsu)]

    def broker_link(self, server_id: int) -> Link:
        server = self.servers[server_id]
        return Link(server.broker_distance, server.broker_bandwidth)

    def all_pus(self) -> list[ProcessingUnit]:
        return [pu for server in self.servers for pu in server.pus]


@dataclass
class SimulationClock:
    now: float = 0.0
    tick: float = 1.0

    def advance(self) -> float:
        self.now += self.tick
        return self.now


def validate_topology(topology: Topology) -> None:
    """Raise :class:`ConfigurationError` naming the first violated rule."""
    lo, hi = topology.distance_range
    _unique("vehicle", [v.id for v in topology.vehicles])
    _unique("rsu", [r.id for r in topology.rsus])
    _unique("server", [s.id for s in topology.servers])
    if not topology.vehicles:
        raise ConfigurationError("topology", "no vehicles")
    if not topology.rsus:
        raise ConfigurationError("topology", "no RSUs")
    if not topology.servers:
        raise ConfigurationError("topology", "no edge servers")
    rsu_ids = {r.id for r in topology.rsus}
    for position, vehicle in enumerate(topology.vehicles):
        if vehicle.id != position:
            raise ConfigurationError(f"vehicle {vehicle.id}", "ids must be 0..n-1 in order")
        if vehicle.rsu not in rsu_ids:
            raise ConfigurationError(f"vehicle {vehicle.id}", f"unknown RSU {vehicle.rsu}")
        if (vehicle.id, vehicle.rsu) not in topology.vehicle_links:
            raise ConfigurationError(f"vehicle {vehicle.id}", "no link to its associated RSU")
    for (vid, rid), link in topology.vehicle_links.items():
        _check_link(f"link v{vid}-rsu{rid}", link.distance, link.bandwidth, lo, hi)
    for position, server in enumerate(topology.servers):
        name = f"server {server.id}"
        if server.id != position:
            raise ConfigurationError(name, "ids must be 0..n-1 in order")
        if not server.pus:
            raise ConfigurationError(name, "has no processing units")
        _check_link(f"{name} broker link", server.broker_distance, server.broker_bandwidth, lo, hi)
        for j, pu in enumerate(server.pus):
            if pu.server != server.id or pu.index != j:
                raise ConfigurationError(f"pu {pu.id}", f"must carry id ({server.id}, {j})")
            if not pu.rate > 0:
                raise ConfigurationError(f"pu {pu.id}", "rate must be > 0")


def _check_link(name: str, distance: float, bandwidth: float, lo: float, hi: float) -> None:
    if not bandwidth > 0:
        raise ConfigurationError(name, "bandwidth must be > 0")
    if not lo <= distance <= hi:
        raise ConfigurationError(name, f"distance {distance} outside [{lo}, {hi}]")


def _unique(kind: str, ids: list[int]) -> None:
    seen = set()
    for i in ids:
        if i in seen:
            raise ConfigurationError(f"{kind} {i}", "duplicate id")
        seen.add(i)


def task_is_processed(task: Task) -> bool:
    return (
        task.state is TaskState.COMPLETED
        and task.completion is not None
        and task.completion <= task.deadline
    )
