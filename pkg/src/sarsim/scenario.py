"""Scenario configuration: JSON schema, defaults, and topology sampling."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Any

from . import rng as rngmod
from .model import (
    ConfigurationError,
    EdgeServer,
    Link,
    ProcessingUnit,
    Rsu,
    Topology,
    Vehicle,
    quantize,
    validate_topology,
)
from .rsp import RspKind
from .tsp import TspKind
from .workload import GroupSpec, WorkloadPlan, default_groups

RATE_STEP = 0.01


class ScenarioError(ValueError):
    """Unparseable or structurally wrong scenario file."""


@dataclass
class TopologyParams:
    n_vehicles: int = 4
    n_rsus: int = 2
    n_servers: int = 4
    pu_count: tuple[int, int] = (8, 12)
    rate_range: tuple[float, float] = (0.5, 1.2)
    distance_range: tuple[float, float] = (50.0, 250.0)
    area_km: tuple[float, float] = (0.7, 0.7)  # informational; no mobility model
    vehicle_bandwidth: float = 100.0
    broker_bandwidth: float = 100.0


@dataclass
class SweepParams:
    tsp: list[str] = field(default_factory=lambda: [k.value for k in TspKind])
    rsp: list[str] = field(default_factory=lambda: [k.value for k in RspKind])
    pora: list[bool] = field(default_factory=lambda: [False, True])
    alpha: list[float] = field(default_factory=lambda: [1.0])
    beta: float = 0.5
    beta_sign: int = 1
    pora_k: int = 3
    covert_k: float = 2.0
    era_high: float = 1.5
    era_medium: float = 3.0
    pqm_critical: float = 2.0


@dataclass
class Scenario:
    topology: TopologyParams = field(default_factory=TopologyParams)
    groups: list[GroupSpec] = field(default_factory=default_groups)
    sweep: SweepParams = field(default_factory=SweepParams)
    seeds: list[int] = field(default_factory=lambda: list(range(30)))

    def workload_plan(self, seed: int) -> WorkloadPlan:
        return WorkloadPlan(list(self.groups), seed, self.topology.n_vehicles)

    def to_dict(self) -> dict:
        return {
            "topology": _plain(dataclasses.asdict(self.topology)),
            "groups": [_plain(dataclasses.asdict(g)) for g in self.groups],
            "sweep": _plain(dataclasses.asdict(self.sweep)),
            "seeds": list(self.seeds),
        }


def _plain(d: dict) -> dict:
    return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


def default_scenario() -> Scenario:
    return Scenario()


def _build(cls, data: Any, where: str):
    if not isinstance(data, dict):
        raise ScenarioError(f"{where}: expected an object")
    names = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - set(names))
    if unknown:
        raise ScenarioError(f"{where}: unknown keys {unknown}")
    kwargs = {}
    for key, value in data.items():
        default = getattr(cls(), key) if cls is not GroupSpec else None
        if isinstance(default, tuple) or (cls is GroupSpec and key.endswith("_range")):
            if not isinstance(value, list) or len(value) != 2:
                raise ScenarioError(f"{where}.{key}: expected [lo, hi]")
            value = tuple(value)
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{where}: {exc}") from exc


def scenario_from_dict(data: dict) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario: expected an object")
    unknown = sorted(set(data) - {"topology", "groups", "sweep", "seeds"})
    if unknown:
        raise ScenarioError(f"scenario: unknown keys {unknown}")
    scenario = Scenario()
    if "topology" in data:
        scenario.topology = _build(TopologyParams, data["topology"], "topology")
    if "groups" in data:
        if not isinstance(data["groups"], list) or not data["groups"]:
            raise ScenarioError("groups: expected a non-empty list")
        scenario.groups = [_build(GroupSpec, g, f"groups[{i}]") for i, g in enumerate(data["groups"])]
    if "sweep" in data:
        scenario.sweep = _build(SweepParams, data["sweep"], "sweep")
    if "seeds" in data:
        seeds = data["seeds"]
        if not isinstance(seeds, list) or not seeds or not all(isinstance(s, int) for s in seeds):
            raise ScenarioError("seeds: expected a non-empty list of integers")
        scenario.seeds = seeds
    validate_scenario(scenario)
    return scenario


def validate_scenario(scenario: Scenario) -> None:
    """Raise ConfigurationError / ScenarioError on semantically invalid values."""
    t = scenario.topology
    for name in ("n_vehicles", "n_rsus", "n_servers"):
        if getattr(t, name) < 1:
            raise ConfigurationError("topology", f"{name} must be >= 1")
    if not 1 <= t.pu_count[0] <= t.pu_count[1]:
        raise ConfigurationError("topology", "pu_count must satisfy 1 <= lo <= hi")
    if not 0 < t.rate_range[0] <= t.rate_range[1]:
        raise ConfigurationError("topology", "rate > 0 violated by rate_range")
    if not 0 <= t.distance_range[0] <= t.distance_range[1]:
        raise ConfigurationError("topology", "distance_range must satisfy 0 <= lo <= hi")
    if not (t.vehicle_bandwidth > 0 and t.broker_bandwidth > 0):
        raise ConfigurationError("topology", "bandwidths must be > 0")
    groups = [g.group for g in scenario.groups]
    if len(set(groups)) != len(groups):
        raise ConfigurationError("groups", "duplicate group numbers")
    s = scenario.sweep
    try:
        [TspKind(k) for k in s.tsp]
        [RspKind(k) for k in s.rsp]
    except ValueError as exc:
        raise ScenarioError(f"sweep: {exc}") from exc
    if not s.tsp or not s.rsp or not s.pora or not s.alpha:
        raise ScenarioError("sweep: tsp, rsp, pora and alpha lists must be non-empty")
    if s.beta_sign not in (1, -1):
        raise ScenarioError("sweep.beta_sign must be 1 or -1")
    if True in s.pora and t.pu_count[0] <= s.pora_k:
        raise ConfigurationError("sweep", f"every server needs more than pora_k={s.pora_k} PUs")


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        text = fh.read()
    if not text.strip():
        return default_scenario()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return scenario_from_dict(data)


def save_scenario(scenario: Scenario, path) -> None:
    with open(path, "w") as fh:
        json.dump(scenario.to_dict(), fh, indent=2)
        fh.write("\n")


def build_topology(params: TopologyParams, seed: int) -> Topology:
    """Sample a static topology from the seed's topology stream.

    Draw order: every (vehicle, rsu) distance (vehicle-major), then per
    server its PU count, its PU rates and its broker distance. Each vehicle
    associates with its nearest RSU.
    """
    gen = rngmod.stream(seed, rngmod.TOPOLOGY)
    lo, hi = params.distance_range

    def distance() -> float:
        return min(max(quantize(gen.uniform(lo, hi)), lo), hi)

    links = {}
    vehicles = []
    for v in range(params.n_vehicles):
        dists = [distance() for _ in range(params.n_rsus)]
        for r, d in enumerate(dists):
            links[(v, r)] = Link(d, params.vehicle_bandwidth)
        nearest = min(range(params.n_rsus), key=lambda r: (dists[r], r))
        vehicles.append(Vehicle(v, nearest))
    servers = []
    rlo, rhi = params.rate_range
    for k in range(params.n_servers):
        n = int(gen.integers(params.pu_count[0], params.pu_count[1] + 1))
        rates = [min(max(quantize(gen.uniform(rlo, rhi), RATE_STEP), rlo), rhi) for _ in range(n)]
        pus = [ProcessingUnit(k, j, rate) for j, rate in enumerate(rates)]
        servers.append(EdgeServer(k, pus, distance(), params.broker_bandwidth))
    topology = Topology(vehicles, [Rsu(r) for r in range(params.n_rsus)], links, servers, params.distance_range)
    validate_topology(topology)
    return topology
