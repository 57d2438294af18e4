"""Task completion rate and cross-seed aggregation.

Standard deviations are population standard deviations (ddof=0): the seed
set is a fixed finite population, not a sample.
"""

from __future__ import annotations

import csv
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from scipy import stats

from .engine import InvalidReason, SimulationReport
from .model import task_is_processed

CSV_COLUMNS = (
    "tsp", "rsp", "pora", "alpha", "beta", "beta_sign", "seed",
    "n_tasks", "n_pt", "tcr", "tcr_g1", "tcr_g2", "tcr_g3", "tcr_g4",
)


@dataclass(frozen=True)
class PolicyPair:
    tsp: str
    rsp: str
    pora: bool = False
    alpha: Optional[float] = None  # only meaningful for sars
    beta: Optional[float] = None
    beta_sign: Optional[int] = None

    @property
    def label(self) -> str:
        if self.rsp != "sars":
            return f"{self.tsp}+{self.rsp}"
        tag = "+pora" if self.pora else ""
        penalty = ",penalty" if self.beta_sign == -1 else ""
        return f"{self.tsp}+sars{tag}(a={self.alpha:g}{penalty})"


@dataclass
class RunMetrics:
    n_tasks: int
    n_pt: int
    tcr: float
    per_group_tcr: dict[int, float]
    per_group_processed: dict[int, int]
    mean_delays: dict[str, float]
    invalid_reasons: dict[str, int] = field(default_factory=dict)


def percent(part: int, whole: int) -> float:
    return 100.0 * part / whole if whole else 0.0


def compute_tcr(report: SimulationReport) -> RunMetrics:
    tasks = report.tasks
    processed = [t for t in tasks if task_is_processed(t)]
    groups = sorted({t.group for t in tasks})
    size = Counter(t.group for t in tasks)
    done = Counter(t.group for t in processed)
    delays = [report.delays[t.id] for t in processed]
    n = len(delays)
    mean_delays = {
        "transmission": sum(d.transmission for d in delays) / n if n else 0.0,
        "broker_queue": sum(d.broker_queue for d in delays) / n if n else 0.0,
        "processing": sum(d.processing for d in delays) / n if n else 0.0,
    }
    reasons = Counter(r.value for r in report.invalid_reasons.values())
    return RunMetrics(
        n_tasks=len(tasks),
        n_pt=len(processed),
        tcr=percent(len(processed), len(tasks)),
        per_group_tcr={g: percent(done[g], size[g]) for g in groups},
        per_group_processed={g: done[g] for g in groups},
        mean_delays=mean_delays,
        invalid_reasons={r.value: reasons.get(r.value, 0) for r in InvalidReason},
    )


@dataclass(frozen=True)
class CellSummary:
    pair: PolicyPair
    n: int
    mean: float
    sd: float
    min: float
    max: float
    delta_vs_sars: Optional[float]  # mean - mean(sars, same tsp, pora off)
    delta_vs_sars_pora: Optional[float]  # mean - mean(sars, same tsp, pora on)


def mean_sd(values: Sequence[float]) -> tuple[float, float]:
    m = sum(values) / len(values)
    return m, math.sqrt(sum((v - m) ** 2 for v in values) / len(values))


@dataclass(frozen=True)
class PairedComparison:
    """One-sided paired t-test of ``treatment > control`` over shared seeds."""

    n: int
    mean_treatment: float
    mean_control: float
    mean_diff: float
    t_stat: float
    p_value: float

    def significant(self, level: float = 0.05) -> bool:
        return self.p_value < level


def paired_comparison(treatment: Sequence[float], control: Sequence[float]) -> PairedComparison:
    if len(treatment) != len(control) or len(treatment) < 2:
        raise ValueError("paired comparison needs two equal-length samples of size >= 2")
    diffs = [a - b for a, b in zip(treatment, control)]
    mean_diff = sum(diffs) / len(diffs)
    if max(diffs) == min(diffs):
        # zero variance: the t statistic is undefined, the sign decides
        t_stat, p_value = math.copysign(math.inf, mean_diff) if mean_diff else 0.0, 0.0 if mean_diff > 0 else 1.0
    else:
        res = stats.ttest_rel(treatment, control, alternative="greater")
        t_stat, p_value = float(res.statistic), float(res.pvalue)
    return PairedComparison(
        len(diffs), sum(treatment) / len(treatment), sum(control) / len(control), mean_diff, t_stat, p_value
    )


def aggregate(cells: Iterable[tuple[PolicyPair, int, RunMetrics]]) -> list[CellSummary]:
    """Per-cell TCR statistics across seeds, in first-seen cell order."""
    runs: dict[PolicyPair, list[float]] = defaultdict(list)
    for pair, _seed, m in cells:
        runs[pair].append(m.tcr)
    means = {p: mean_sd(v)[0] for p, v in runs.items()}

    def reference(tsp: str, pora: bool) -> Optional[float]:
        for p, m in means.items():
            if p.tsp == tsp and p.rsp == "sars" and p.pora == pora:
                return m
        return None

    out = []
    for pair, values in runs.items():
        m, sd = mean_sd(values)
        ref, ref_pora = reference(pair.tsp, False), reference(pair.tsp, True)
        out.append(
            CellSummary(
                pair, len(values), m, sd, min(values), max(values),
                None if ref is None else m - ref,
                None if ref_pora is None else m - ref_pora,
            )
        )
    return out


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "on" if value else "off"
    return repr(value) if isinstance(value, float) else str(value)


def csv_row(pair: PolicyPair, seed: int, m: RunMetrics) -> list[str]:
    groups = [m.per_group_tcr.get(g) for g in (1, 2, 3, 4)]
    return [
        pair.tsp, pair.rsp, _fmt(pair.pora), _fmt(pair.alpha), _fmt(pair.beta), _fmt(pair.beta_sign),
        str(seed), str(m.n_tasks), str(m.n_pt), _fmt(m.tcr), *(_fmt(g) for g in groups),
    ]


def write_csv(rows: Iterable[tuple[PolicyPair, int, RunMetrics]], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for pair, seed, m in rows:
            writer.writerow(csv_row(pair, seed, m))


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def format_summary(summaries: Sequence[CellSummary]) -> str:
    header = f"{'cell':<32} {'n':>3} {'mean':>7} {'sd':>6} {'min':>6} {'max':>6} {'d_sars':>7} {'d_pora':>7}"
    lines = ["TCR (%) per cell across seeds; sd is the population standard deviation.", header, "-" * len(header)]
    for s in summaries:
        d1 = "" if s.delta_vs_sars is None else f"{s.delta_vs_sars:+.3f}"
        d2 = "" if s.delta_vs_sars_pora is None else f"{s.delta_vs_sars_pora:+.3f}"
        lines.append(f"{s.pair.label:<32} {s.n:>3} {s.mean:7.3f} {s.sd:6.3f} {s.min:6.2f} {s.max:6.2f} {d1:>7} {d2:>7}")
    return "\n".join(lines) + "\n"
