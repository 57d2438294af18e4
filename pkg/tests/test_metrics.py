import random

import pytest

from sarsim.engine import InvalidReason, SimulationReport
from sarsim.metrics import PolicyPair, RunMetrics, aggregate, compute_tcr, mean_sd, paired_comparison
from sarsim.model import TaskState
from sarsim.timing import DelayBreakdown

from conftest import make_task


def synthetic_report(outcomes):
    """``outcomes``: list of (group, 'ok' | 'late' | reason)."""
    tasks, delays, reasons = [], {}, {}
    for i, (group, outcome) in enumerate(outcomes):
        t = make_task(i, release=0.0, deadline=10.0)
        t.group = group
        if outcome in ("ok", "late"):
            t.state = TaskState.COMPLETED
            t.completion = 9.0 if outcome == "ok" else 10.5
            delays[i] = DelayBreakdown(1.0, 2.0, t.completion - 3.0)
        else:
            t.state = TaskState.INVALID
            reasons[i] = InvalidReason(outcome)
        tasks.append(t)
    return SimulationReport(tasks, [], {}, delays, reasons, [], {}, {})


def test_tcr_example():
    report = synthetic_report([(1 + i % 4, "ok") for i in range(700)] + [(1 + i % 4, "no-feasible-pu") for i in range(100)])
    m = compute_tcr(report)
    assert (m.n_pt, m.tcr) == (700, 87.5)
    assert sum(m.per_group_processed.values()) == m.n_pt
    assert m.invalid_reasons == {"no-feasible-pu": 100, "no-reserved-pu": 0, "arrival-infeasible": 0}


@pytest.mark.parametrize("outcome, expected", [("ok", 100.0), ("arrival-infeasible", 0.0)])
def test_tcr_extremes(outcome, expected):
    assert compute_tcr(synthetic_report([(1, outcome)] * 20)).tcr == expected


def test_tcr_matches_recount():
    rnd = random.Random(0)
    choices = ["ok", "late", "no-feasible-pu", "no-reserved-pu", "arrival-infeasible"]
    for _ in range(200):
        outcomes = [(rnd.randint(1, 4), rnd.choice(choices)) for _ in range(rnd.randint(1, 60))]
        m = compute_tcr(synthetic_report(outcomes))
        ok = [g for g, o in outcomes if o == "ok"]
        assert m.n_pt == len(ok)
        assert m.tcr == pytest.approx(100 * len(ok) / len(outcomes))
        for g in {g for g, _ in outcomes}:
            size = sum(1 for h, _ in outcomes if h == g)
            assert m.per_group_tcr[g] == pytest.approx(100 * ok.count(g) / size)
        assert sum(m.invalid_reasons.values()) == sum(1 for _, o in outcomes if o not in ("ok", "late"))
        assert compute_tcr(synthetic_report(outcomes)) == m


def _metrics(tcr):
    return RunMetrics(100, int(tcr), tcr, {}, {}, {})


def test_aggregate_single_and_two_seeds():
    sars = PolicyPair("edf", "sars", False, 1.0, 0.5, 1)
    latest = PolicyPair("edf", "latest")
    cells = [(sars, 0, _metrics(80.0)), (sars, 1, _metrics(90.0)), (latest, 0, _metrics(70.0))]
    by = {s.pair: s for s in aggregate(cells)}
    assert (by[sars].mean, by[sars].sd, by[sars].min, by[sars].max) == (85.0, 5.0, 80.0, 90.0)
    assert (by[latest].mean, by[latest].sd) == (70.0, 0.0)
    assert by[latest].delta_vs_sars == -15.0
    assert by[latest].delta_vs_sars_pora is None


def test_population_sd():
    assert mean_sd([1.0, 3.0]) == (2.0, 1.0)


def test_paired_comparison_against_hand_computed_t():
    a = [45.0, 44.0, 46.5, 43.0, 47.0]
    b = [44.0, 44.5, 45.0, 42.0, 45.5]
    d = [x - y for x, y in zip(a, b)]
    m = sum(d) / len(d)
    sd = (sum((x - m) ** 2 for x in d) / (len(d) - 1)) ** 0.5
    res = paired_comparison(a, b)
    assert res.mean_diff == pytest.approx(m)
    assert res.t_stat == pytest.approx(m / (sd / len(d) ** 0.5))
    assert 0 < res.p_value < 0.5
    assert paired_comparison(b, a).p_value == pytest.approx(1 - res.p_value)


def test_paired_comparison_constant_difference():
    assert paired_comparison([2.0, 3.0], [1.0, 2.0]).p_value == 0.0
    assert paired_comparison([1.0, 2.0], [1.0, 2.0]).p_value == 1.0
    with pytest.raises(ValueError):
        paired_comparison([1.0], [0.0])
