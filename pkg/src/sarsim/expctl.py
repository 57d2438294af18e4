"""Policy sweeps over seeds with a paired design.

For a given seed every cell sees the same topology and the same task set,
so TCR differences between cells isolate the policies.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import metrics
from .engine import EngineConfig, PoraSettings, SimulationReport, check_report, run
from .metrics import PolicyPair, RunMetrics
from .rsp import RspKind, RspPolicy
from .scenario import Scenario, build_topology
from .tsp import TspKind, TspPolicy

log = logging.getLogger(__name__)

WORKERS_ENV = "SARSIM_WORKERS"


class CellFailure(RuntimeError):
    def __init__(self, pair: PolicyPair, seed: int, cause: BaseException):
        super().__init__(f"cell {pair.label} seed {seed} failed: {cause!r}")
        self.pair = pair
        self.seed = seed


def cells(scenario: Scenario) -> list[PolicyPair]:
    """Every policy cell of the sweep; baselines never get reserved PUs."""
    s = scenario.sweep
    out = []
    for tsp in s.tsp:
        for rsp in s.rsp:
            if rsp != RspKind.SARS.value:
                out.append(PolicyPair(tsp, rsp))
                continue
            for pora in s.pora:
                for alpha in s.alpha:
                    out.append(PolicyPair(tsp, rsp, bool(pora), float(alpha), float(s.beta), int(s.beta_sign)))
    return out


def tsp_policy(scenario: Scenario, kind: str) -> TspPolicy:
    s = scenario.sweep
    params = {
        TspKind.COVERT.value: {"k": s.covert_k},
        TspKind.ERA.value: {"high": s.era_high, "medium": s.era_medium},
        TspKind.PQM.value: {"critical": s.pqm_critical},
    }.get(kind, {})
    return TspPolicy(TspKind(kind), params)


def engine_config(scenario: Scenario, pair: PolicyPair, seed: int, debug: bool = False) -> EngineConfig:
    if pair.rsp == RspKind.SARS.value:
        rsp = RspPolicy(RspKind.SARS, pair.alpha, pair.beta, pair.beta_sign, pair.pora)
    else:
        rsp = RspPolicy(RspKind(pair.rsp))
    return EngineConfig(
        topology=build_topology(scenario.topology, seed),
        workload=scenario.workload_plan(seed),
        tsp=tsp_policy(scenario, pair.tsp),
        rsp=rsp,
        pora=PoraSettings(reserve=pair.pora, k=scenario.sweep.pora_k),
        seed=seed,
        debug=debug,
    )


@dataclass
class CellResult:
    pair: PolicyPair
    seed: int
    metrics: RunMetrics
    trace: Optional[list[str]] = None
    violations: Optional[list[str]] = None


def run_cell(scenario: Scenario, pair: PolicyPair, seed: int, keep_trace: bool = False, debug: bool = False) -> CellResult:
    report: SimulationReport = run(engine_config(scenario, pair, seed, debug))
    total = sum(g.count for g in scenario.groups)
    return CellResult(
        pair,
        seed,
        metrics.compute_tcr(report),
        report.trace_lines() if keep_trace else None,
        check_report(report, total) if debug else None,
    )


def _run_job(args) -> CellResult:
    scenario, pair, seed, keep_trace, debug = args
    try:
        return run_cell(scenario, pair, seed, keep_trace, debug)
    except Exception as exc:
        raise CellFailure(pair, seed, exc) from exc


def worker_count(default: Optional[int] = None) -> int:
    value = os.environ.get(WORKERS_ENV)
    if value:
        return max(1, int(value))
    return default or os.cpu_count() or 1


def run_sweep(
    scenario: Scenario,
    seeds: Optional[Sequence[int]] = None,
    pairs: Optional[Sequence[PolicyPair]] = None,
    workers: Optional[int] = None,
    keep_traces: bool = False,
    debug: bool = False,
) -> list[CellResult]:
    """Run every (cell, seed) combination; results come back in cell-major order."""
    seeds = list(scenario.seeds if seeds is None else seeds)
    pairs = list(cells(scenario) if pairs is None else pairs)
    jobs = [(scenario, pair, seed, keep_traces, debug) for pair in pairs for seed in seeds]
    workers = worker_count() if workers is None else workers
    log.info("sweep: %d cells x %d seeds on %d workers", len(pairs), len(seeds), workers)
    if workers <= 1 or len(jobs) <= 1:
        return [_run_job(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def write_outputs(results: Sequence[CellResult], out: Path, traces: bool = False) -> dict[str, Path]:
    out.mkdir(parents=True, exist_ok=True)
    rows = [(r.pair, r.seed, r.metrics) for r in results]
    paths = {"csv": out / "metrics.csv", "summary": out / "summary.txt"}
    metrics.write_csv(rows, paths["csv"])
    paths["summary"].write_text(metrics.format_summary(metrics.aggregate(rows)))
    if traces:
        trace_dir = out / "traces"
        trace_dir.mkdir(exist_ok=True)
        for r in results:
            if r.trace is None:
                continue
            name = f"{r.pair.label.replace('+', '_').replace('(', '_').replace(')', '').replace('=', '')}_seed{r.seed}.ndjson"
            (trace_dir / name).write_text("".join(line + "\n" for line in r.trace))
    return paths
