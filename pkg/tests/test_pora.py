import random
from fractions import Fraction

import numpy as np
import pytest

from sarsim.model import ConfigurationError, EdgeServer, ProcessingUnit
from sarsim.pora import (
    ReservationState,
    candidate_pool,
    dispatch_urgent,
    mean_rate,
    rate_deviations,
    release_reserved,
    reserve,
)

from conftest import make_task


def server(k, rates, distance=50.0):
    return EdgeServer(k, [ProcessingUnit(k, j, r) for j, r in enumerate(rates)], distance, 100.0)


def test_reserve_example_k1():
    s = server(0, [0.5, 1.0, 1.2])
    assert mean_rate(s) == pytest.approx(0.9)
    assert [round(d, 12) for d, _ in rate_deviations(s)] == [0.4, 0.1, 0.3]
    state = reserve([s], 1, np.random.default_rng(0))
    assert state.reserved == {0: (0, 1)}
    assert s.pus[1].reserved and not s.pus[0].reserved


def test_equal_rates_use_id_tie_break():
    s = server(0, [0.8] * 6)
    assert candidate_pool(s, 3) == [(0, 0), (0, 1), (0, 2)]
    for seed in range(20):
        fresh = server(0, [0.8] * 6)
        state = reserve([fresh], 3, np.random.default_rng(seed))
        assert state.reserved[0] in {(0, 0), (0, 1), (0, 2)}


def test_candidate_pool_matches_sort_oracle():
    rnd = random.Random(1)
    for _ in range(1000):
        rates = [round(rnd.uniform(0.5, 1.2), 2) for _ in range(rnd.randint(4, 12))]
        exact = [Fraction(str(r)) for r in rates]
        mean = sum(exact) / len(exact)
        oracle = [j for _, j in sorted((abs(r - mean), j) for j, r in enumerate(exact))][:3]
        assert candidate_pool(server(0, rates), 3) == [(0, j) for j in oracle]


def test_reserve_requires_spare_pus():
    with pytest.raises(ConfigurationError):
        reserve([server(0, [1.0, 1.0, 1.0])], 3, np.random.default_rng(0))


def test_one_standby_per_server():
    servers = [server(k, [0.5, 0.7, 0.9, 1.1, 1.2]) for k in range(4)]
    state = reserve(servers, 3, np.random.default_rng(4))
    assert sorted(state.reserved) == [0, 1, 2, 3]
    assert all(sum(pu.reserved for pu in s.pus) == 1 for s in servers)


def test_dispatch_single_candidate():
    s = server(0, [0.5, 1.0, 1.5], distance=0.0)
    state = reserve([s], 1, np.random.default_rng(0))
    assert state.reserved[0] == (0, 1)
    task = make_task(release=0.0, deadline=16.0, workload=5.0)
    got = dispatch_urgent(state, task, [s], now=10.0)
    assert got == ((0, 1), 15.0)
    assert state.in_use == {(0, 1)}


def test_dispatch_fails_when_all_in_use():
    s = server(0, [0.5, 1.0, 1.5])
    state = reserve([s], 1, np.random.default_rng(0))
    state.in_use.add((0, 1))
    assert dispatch_urgent(state, make_task(deadline=100.0), [s], 0.0) is None


def test_dispatch_matches_enumeration():
    rnd = random.Random(8)
    for _ in range(300):
        servers = [server(k, [round(rnd.uniform(0.5, 1.2), 2) for _ in range(5)], rnd.choice([50.0, 150.0])) for k in range(4)]
        state = reserve(servers, 3, np.random.default_rng(rnd.randint(0, 99)))
        busy = set(rnd.sample(sorted(state.reserved.values()), rnd.randint(0, 3)))
        state.in_use |= busy
        now = 5.0
        task = make_task(deadline=now + rnd.choice([3, 6, 9, 14]), workload=rnd.choice([2.0, 4.0, 7.0]), size=2.0)
        options = []
        for s in servers:
            pid = state.reserved[s.id]
            if pid in busy:
                continue
            est = now + 2.0 * s.broker_distance / 100.0 + task.workload / s.pus[pid[1]].rate
            if est <= task.deadline:
                options.append((est, pid))
        got = dispatch_urgent(state, task, servers, now)
        assert (got[0] if got else None) == (min(options)[1] if options else None)


def test_release_round_trip_and_independence():
    servers = [server(k, [0.5, 1.0, 1.5]) for k in range(2)]
    state = reserve(servers, 1, np.random.default_rng(0))
    a = dispatch_urgent(state, make_task(deadline=100.0), servers, 0.0)[0]
    b = dispatch_urgent(state, make_task(deadline=100.0), servers, 0.0)[0]
    assert a != b
    release_reserved(state, a)
    assert state.in_use == {b}
    release_reserved(state, b)
    assert state.in_use == set()
    with pytest.raises(ValueError):
        release_reserved(state, a)


def test_state_rejects_foreign_in_use():
    with pytest.raises(ValueError):
        ReservationState({0: (0, 1)}, 1, {(0, 2)})


def test_decimal_ties_fall_back_to_id():
    # mean 0.75: 0.6 and 0.9 are equidistant although binary rounding disagrees
    s = server(0, [1.2, 0.6, 0.5, 0.7, 0.9, 0.6])
    assert candidate_pool(s, 4) == [(0, 3), (0, 1), (0, 4), (0, 5)]
