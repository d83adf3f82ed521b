import numpy as np
import pytest

from haulcycle.errors import InvalidConfig
from haulcycle.flow import flow_closed_form
from haulcycle.moments import TABLE2
from haulcycle.netmodel import NetworkSpec, mining_preset
from haulcycle.simcycle import SimConfig, simulate, sweep

DETERMINISTIC = (0.0, 0.0, 0.0, 0.0)


@pytest.fixture(scope="module")
def long_runs():
    base = simulate(SimConfig(mining_preset(5), horizon=1e6, seed=21))
    dist = simulate(SimConfig(mining_preset(5), TABLE2, horizon=1e6, seed=22))
    return base, dist


def test_single_truck_matches_exact():
    r = simulate(SimConfig(mining_preset(1), horizon=1e6, seed=3))
    assert r.idle1 == pytest.approx(0.880, abs=0.005)
    d = simulate(SimConfig(mining_preset(1), TABLE2, horizon=1e6, seed=4))
    assert d.idle1 == pytest.approx(0.8695925, abs=0.005)
    assert d.breakdowns > 0 and r.breakdowns == 0


@pytest.mark.parametrize("K", [9, 10, 12])
def test_deterministic_saturated_is_flow(K):
    spec = mining_preset(K, cvs=DETERMINISTIC)
    r = simulate(SimConfig(spec, horizon=2e5, warmup=1e3))
    assert r.idle1 == pytest.approx(flow_closed_form(spec.means, K).idle1, abs=1e-9)


@pytest.mark.parametrize("K", [1, 3, 8])
def test_deterministic_periodic_window_is_flow(K):
    # in the no-wait regime the pattern repeats every 12.5 min; use whole periods
    spec = mining_preset(K, cvs=DETERMINISTIC)
    warm = 100 * 12.5
    r = simulate(SimConfig(spec, horizon=warm + 8000 * 12.5, warmup=warm))
    assert r.idle1 == pytest.approx(flow_closed_form(spec.means, K).idle1, abs=1e-9)


@pytest.mark.parametrize("which", [0, 1])
def test_littles_law_and_conservation(long_runs, which):
    r = long_runs[which]
    np.testing.assert_allclose(r.mean_queue, r.lambda_node * r.mean_sojourn, rtol=0.01)
    assert r.mean_queue.sum() == pytest.approx(5, rel=1e-3)
    assert 1 - r.idle1 == pytest.approx(r.lambda_node[0] * r.mean_service1, rel=0.01)
    assert np.ptp(r.lambda_node) / r.lambda_node.mean() < 0.02
    assert 0.0 <= r.idle1 <= 1.0


@pytest.mark.parametrize("which", [0, 1])
def test_departures_feed_next_arrivals(long_runs, which):
    r = long_runs[which]
    np.testing.assert_array_equal(r.departures, np.roll(r.arrivals, -1))


@pytest.mark.parametrize("warmup", [0.0, 777.7])
def test_flow_balance_with_warmup(warmup):
    r = simulate(SimConfig(mining_preset(7), TABLE2, horizon=5e4, warmup=warmup, seed=5))
    np.testing.assert_array_equal(r.departures, np.roll(r.arrivals, -1))
    assert r.mean_queue.sum() == pytest.approx(7, rel=1e-9)


def test_negative_draws_rare(long_runs):
    r = long_runs[0]
    assert r.neg_sample_count / r.draw_count < 1e-3


def test_negative_draws_are_counted():
    spec = mining_preset(2, cvs=(1.5, 0.2, 0.1, 0.2))
    r = simulate(SimConfig(spec, horizon=2e4, seed=1))
    assert r.neg_sample_count > 0


def test_sweep_contract():
    cfg = SimConfig(mining_preset(), horizon=2e5, seed=9)
    a = sweep(cfg, 1, 10)
    assert [e.K for e in a] == list(range(1, 11))
    idle = np.array([e.idle1 for e in a])
    assert np.all(np.diff(idle) < 0.01)
    b = sweep(cfg, 1, 10)
    assert [e.idle1 for e in a] == [e.idle1 for e in b]
    one = sweep(cfg, 4, 4)
    assert len(one) == 1 and one[0].idle1 == a[3].idle1
    with pytest.raises(InvalidConfig):
        sweep(cfg, 0, 3)


def test_seed_changes_result():
    spec = mining_preset(4)
    a = simulate(SimConfig(spec, horizon=1e4, seed=1))
    b = simulate(SimConfig(spec, horizon=1e4, seed=2))
    assert a.idle1 != b.idle1


def test_config_validation():
    with pytest.raises(InvalidConfig):
        SimConfig(mining_preset(2), horizon=10, warmup=10)
    with pytest.raises(InvalidConfig):
        SimConfig(mining_preset(2), horizon=10, warmup=-1)
    spec = mining_preset(2)
    r = np.array([[0, 0.5, 0, 0.5], [0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0]])
    with pytest.raises(InvalidConfig):
        SimConfig(NetworkSpec(spec.nodes, 2, routing=r))
