from collections import Counter

import pytest

from sarsim.model import SimulationClock
from sarsim.workload import GroupSpec, WorkloadPlan, default_groups, generate, read_csv, release_events, write_csv

from conftest import make_task

TABLE = {1: (40, 10), 2: (70, 10), 3: (40, 20), 4: (70, 20)}  # release hi, slack hi


@pytest.fixture(scope="module")
def tasks():
    return generate(WorkloadPlan(seed=3))


def test_default_plan_sizes(tasks):
    assert len(tasks) == 800
    assert Counter(t.group for t in tasks) == {1: 200, 2: 200, 3: 200, 4: 200}
    assert sorted(t.id for t in tasks) == list(range(800))


def test_attributes_inside_table_ranges(tasks):
    for t in tasks:
        release_hi, slack_hi = TABLE[t.group]
        assert 0 <= t.release <= release_hi
        assert 1 <= t.slack <= slack_hi
        assert 1 <= t.workload <= 10
        assert 1 <= t.file_size <= 5
        assert t.deadline == t.release + t.workload + t.slack
        assert t.deadline - t.release >= t.workload + 1


def test_workload_is_tenths(tasks):
    assert all(abs(t.workload * 10 - round(t.workload * 10)) < 1e-9 for t in tasks)


def test_sorted_by_release_with_stable_ids(tasks):
    keys = [(t.release, t.id) for t in tasks]
    assert keys == sorted(keys)


def test_round_robin_vehicles(tasks):
    assert all(t.vehicle_id == t.id % 4 for t in tasks)


def test_same_seed_same_tasks():
    a = generate(WorkloadPlan(seed=11))
    b = generate(WorkloadPlan(seed=11))
    assert [vars(t) for t in a] == [vars(t) for t in b]
    assert [vars(t) for t in a] != [vars(t) for t in generate(WorkloadPlan(seed=12))]


def test_groups_use_independent_streams():
    base = generate(WorkloadPlan(seed=5))
    extra = default_groups() + [GroupSpec(5, (0, 10), (1, 2), count=3)]
    wider = generate(WorkloadPlan(extra, seed=5))
    pick = lambda ts: sorted((t.group, t.release, t.workload, t.file_size, t.slack) for t in ts if t.group <= 4)
    assert pick(base) == pick(wider)


def test_release_events_grouping():
    ts = [make_task(0, release=0.0), make_task(1, release=0.0), make_task(2, release=3.0)]
    events = list(release_events(ts, SimulationClock()))
    assert [(when, [t.id for t in batch]) for when, batch in events] == [(0.0, [0, 1]), (3.0, [2])]
    assert list(release_events([])) == []


def test_fractional_release_goes_to_next_tick():
    events = list(release_events([make_task(0, release=2.2)]))
    assert events[0][0] == 3.0


def test_release_stream_of_default_plan(tasks):
    events = list(release_events(tasks))
    flat = [t for _, batch in events for t in batch]
    assert len(flat) == 800
    assert sorted(t.id for t in flat) == list(range(800))
    times = [when for when, _ in events]
    assert times == sorted(times)


def test_release_events_requires_sorted_input():
    with pytest.raises(ValueError):
        list(release_events([make_task(0, release=5.0), make_task(1, release=1.0)]))


def test_csv_round_trip(tmp_path, tasks):
    path = tmp_path / "tasks.csv"
    write_csv(tasks, path)
    back = read_csv(path)
    fields = ("id", "vehicle_id", "group", "release", "deadline", "workload", "file_size")
    assert [tuple(getattr(t, f) for f in fields) for t in back] == [tuple(getattr(t, f) for f in fields) for t in tasks]
    assert path.read_text().splitlines()[0] == "id,vehicle,group,release,deadline,workload,size"


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(release_range=(5, 1)),
        dict(workload_range=(0, 10)),
        dict(count=0),
        dict(deadline_slack_range=(-1, 2)),
    ],
)
def test_group_spec_validation(kwargs):
    base = dict(group=1, release_range=(0, 40), deadline_slack_range=(1, 10))
    with pytest.raises(ValueError):
        GroupSpec(**{**base, **kwargs})
