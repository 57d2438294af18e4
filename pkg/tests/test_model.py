import pytest

from sarsim.model import ConfigurationError, TaskState, task_is_processed, validate_topology
from sarsim.scenario import build_topology, default_scenario

from conftest import make_task, make_topology


def test_default_topology_is_valid():
    topo = build_topology(default_scenario().topology, seed=0)
    validate_topology(topo)
    assert len(topo.vehicles) == 4
    assert len(topo.rsus) == 2
    assert len(topo.servers) == 4
    assert all(8 <= len(s.pus) <= 12 for s in topo.servers)
    assert all(0.5 <= pu.rate <= 1.2 for pu in topo.all_pus())


def test_server_without_pus_rejected():
    topo = make_topology([[1.0], []])
    with pytest.raises(ConfigurationError, match="server 1"):
        validate_topology(topo)


def test_zero_rate_rejected():
    topo = make_topology([[1.0, 0.0]])
    with pytest.raises(ConfigurationError, match=r"pu \(0, 1\)"):
        validate_topology(topo)


def test_distance_outside_range_rejected():
    topo = make_topology([[1.0]], vehicle_distance=300.0, distance_range=(50.0, 250.0))
    with pytest.raises(ConfigurationError, match="distance"):
        validate_topology(topo)


def test_nonpositive_bandwidth_rejected():
    topo = make_topology([[1.0]], bandwidth=0.0)
    with pytest.raises(ConfigurationError, match="bandwidth"):
        validate_topology(topo)


def _finished(completion, deadline=10.0):
    task = make_task(deadline=deadline)
    for s in (TaskState.IN_TRANSIT, TaskState.QUEUED, TaskState.ASSIGNED, TaskState.RUNNING, TaskState.COMPLETED):
        task.advance(s)
    task.completion = completion
    return task


@pytest.mark.parametrize("completion, expected", [(9.0, True), (10.0, True), (10.001, False)])
def test_task_is_processed_boundary(completion, expected):
    assert task_is_processed(_finished(completion)) is expected


def test_invalid_task_never_processed():
    task = make_task()
    task.advance(TaskState.IN_TRANSIT)
    task.advance(TaskState.QUEUED)
    task.advance(TaskState.INVALID)
    assert not task_is_processed(task)


def test_lifecycle_rejects_backward_and_skipping_transitions():
    task = make_task()
    with pytest.raises(ValueError):
        task.advance(TaskState.QUEUED)
    task.advance(TaskState.IN_TRANSIT)
    with pytest.raises(ValueError):
        task.advance(TaskState.INVALID)  # only from Queued or Assigned
    task.advance(TaskState.QUEUED)
    task.advance(TaskState.ASSIGNED)
    with pytest.raises(ValueError):
        task.advance(TaskState.QUEUED)


@pytest.mark.parametrize("kwargs", [dict(release=5.0, deadline=5.0), dict(workload=0.0), dict(size=-1.0)])
def test_task_construction_guards(kwargs):
    with pytest.raises(ValueError):
        make_task(**kwargs)
