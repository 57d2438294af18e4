import pytest

from sarsim.model import EdgeServer, Link, ProcessingUnit, Rsu, Task, Topology, Vehicle
from sarsim.scenario import default_scenario


def make_topology(rates_per_server, vehicle_distance=50.0, broker_distances=None, bandwidth=100.0, distance_range=(0.0, 250.0)):
    """One vehicle, one RSU, one server per entry of ``rates_per_server``."""
    broker_distances = broker_distances or [50.0] * len(rates_per_server)
    servers = [
        EdgeServer(k, [ProcessingUnit(k, j, r) for j, r in enumerate(rates)], broker_distances[k], bandwidth)
        for k, rates in enumerate(rates_per_server)
    ]
    return Topology(
        vehicles=[Vehicle(0, 0)],
        rsus=[Rsu(0)],
        vehicle_links={(0, 0): Link(vehicle_distance, bandwidth)},
        servers=servers,
        distance_range=distance_range,
    )


def make_task(id=0, release=0.0, deadline=100.0, workload=5.0, size=1.0, **kw):
    return Task(id=id, vehicle_id=0, group=1, release=release, deadline=deadline, workload=workload, file_size=size, **kw)


@pytest.fixture
def scenario():
    return default_scenario()


# one line per acceptance criterion, echoed at the end of the session
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
