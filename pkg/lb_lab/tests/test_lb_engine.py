import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lb_lab.models.experiment import CostModel, CriterionSpec
from lb_lab.models.partition import PartitionerKind
from lb_lab.models.trace import EffortInterval, EffortSeries, IterationRecord, LbEvent
from lb_lab.services.lb_domain import AutomaticCriterion, PeriodicCriterion, make_criterion
from lb_lab.services.lb_service import (
    automatic_criterion,
    cumulative_imbalance,
    effort,
    effort_series,
    first_trigger,
    imbalance,
    interval_decomposed_time,
    lb_cost,
    modeled_parallel_time,
    periodic_criterion,
    rank_at,
)


def _record(t: int, u: float, mu: float = 1.0) -> IterationRecord:
    return IterationRecord(t=t, work=np.array([mu + u, mu]), max_w=mu + u, mu=mu, u=u)


def _trace(u, mu=None):
    mu = mu if mu is not None else [1.0] * len(u)
    return [_record(t, a, b) for t, (a, b) in enumerate(zip(u, mu))]


def _events(taus, costs):
    return [LbEvent(tau=t, cost=c, algorithm=PartitionerKind.NORCB, migrated=0) for t, c in zip(taus, costs)]


def _brute_first_trigger(u, cost):
    for tau in range(1, len(u) + 1):
        lhs = tau * u[tau - 1] - sum(u[:tau])
        if lhs > 0 and lhs >= cost:
            return tau
    return None


# imbalance

def test_imbalance_examples():
    assert imbalance([4, 4, 4, 4]) == 0.0
    assert imbalance([10, 7, 4]) == 3.0


def test_imbalance_matches_direct_computation(rng):
    for _ in range(100):
        work = rng.uniform(0.0, 100.0, size=int(rng.integers(1, 64)))
        assert imbalance(work) == pytest.approx(work.max() - work.mean(), abs=1e-12)
        assert imbalance(work) >= 0.0


def test_imbalance_of_empty_work_raises():
    with pytest.raises(ValueError):
        imbalance([])


def test_record_keeps_mean_below_max():
    for value in (0.1, 0.3, 1.0 / 3.0, 7.7):
        record = IterationRecord.from_work(3, np.full(7, value))
        assert record.mu <= record.max_w
        assert record.u == record.max_w - record.mu
        assert 0.0 <= record.u <= 1e-12 * value


# criteria

def test_periodic_criterion():
    assert periodic_criterion(600, 600)
    assert not periodic_criterion(0, 600)
    assert not periodic_criterion(599, 600)
    assert periodic_criterion(1200, 600)
    with pytest.raises(ValueError):
        periodic_criterion(5, 0)


def test_automatic_never_fires_without_imbalance():
    assert first_trigger([0.0] * 500, 1.0) is None
    assert not automatic_criterion([0.0] * 10, 0.0)


@pytest.mark.parametrize("k", [0.5 * i for i in range(1, 11)])
@pytest.mark.parametrize("cost", [10.0 * i * i for i in range(1, 11)])
def test_automatic_linear_growth_matches_analytic_trigger(k, cost):
    u = [k * x for x in range(1, 2001)]
    tau = first_trigger(u, cost)
    assert tau == _brute_first_trigger(u, cost)
    assert abs(tau - math.ceil(math.sqrt(2.0 * cost / k))) <= 1


def test_automatic_zero_cost_fires_on_first_increase():
    assert first_trigger([1.0, 2.0, 3.0, 4.0], 0.0) == 2
    assert not automatic_criterion([1.0], 0.0)
    assert automatic_criterion([1.0, 2.0], 0.0)


@given(st.lists(st.floats(min_value=0.0, max_value=100.0), min_size=1, max_size=60), st.floats(min_value=0.0, max_value=500.0))
def test_automatic_criterion_matches_brute_force(u, cost):
    assert first_trigger(u, cost) == _brute_first_trigger(u, cost)


def test_automatic_criterion_rejects_negative_cost():
    with pytest.raises(ValueError):
        automatic_criterion([1.0], -1.0)


def test_automatic_criterion_reset_restarts_history():
    criterion = AutomaticCriterion()
    for u in (1.0, 2.0, 3.0):
        criterion.observe(u)
    assert criterion.should_balance(3, 2.0)
    criterion.reset()
    assert not criterion.should_balance(4, 0.0)
    criterion.observe(5.0)
    assert criterion.pressure == 0.0


def test_smoothing_window_averages_recent_samples():
    criterion = AutomaticCriterion(smoothing_window=2)
    for u in (0.0, 4.0):
        criterion.observe(u)
    # smoothed samples are 0 and 2
    assert criterion.pressure == 2.0 * 2.0 - 2.0


def test_make_criterion():
    assert isinstance(make_criterion(CriterionSpec.parse("periodic:50")), PeriodicCriterion)
    auto = make_criterion(CriterionSpec.parse("auto", smoothing_window=3))
    assert isinstance(auto, AutomaticCriterion)
    assert auto.smoothing_window == 3


# effort

def test_effort_examples():
    assert effort([2.0] * 10, 5.0) == 2.5
    assert effort([0.0] * 7, 0.0) == 0.0
    assert effort(_trace([2.0] * 10), 5.0) == 2.5


def test_effort_matches_direct_sum(rng):
    for _ in range(50):
        u = rng.uniform(0.0, 10.0, size=int(rng.integers(1, 100))).tolist()
        cost = float(rng.uniform(0.0, 100.0))
        assert effort(u, cost) == pytest.approx((sum(u) + cost) / len(u), rel=1e-12)


def test_effort_of_empty_interval_raises():
    with pytest.raises(ValueError):
        effort([], 1.0)


def test_effort_series_covers_the_run():
    trace = _trace([1.0] * 10)
    series = effort_series(trace, _events([3, 7], [4.0, 8.0]), 10, "norcb")
    assert [(i.tau_start, i.tau_end) for i in series.intervals] == [(0, 3), (3, 7), (7, 10)]
    assert [i.effort for i in series.intervals] == [1.0, 2.0, (3.0 + 8.0) / 3]
    assert series.end == 10


def test_effort_series_rejects_unordered_events():
    with pytest.raises(ValueError):
        effort_series(_trace([1.0] * 10), _events([5, 5], [1.0, 1.0]), 10, "rcb")
    with pytest.raises(ValueError):
        effort_series(_trace([1.0] * 10), _events([10], [1.0]), 10, "rcb")


# ranking

def _series(name, bounds, efforts):
    return EffortSeries(name, tuple(EffortInterval(a, b, e) for (a, b), e in zip(zip(bounds, bounds[1:]), efforts)))


def test_rank_at_orders_by_effort():
    series = {"b": _series("b", [0, 10], [1.0]), "a": _series("a", [0, 10], [2.0])}
    assert rank_at(4, series) == ["b", "a"]


def test_rank_at_breaks_ties_by_name():
    series = {"rib": _series("rib", [0, 10], [1.0]), "hsfc": _series("hsfc", [0, 10], [1.0])}
    assert rank_at(0, series) == ["hsfc", "rib"]


def test_rank_at_uses_each_enclosing_interval():
    series = {
        "norcb": _series("norcb", [0, 5, 10], [3.0, 0.5]),
        "rcb": _series("rcb", [0, 2, 10], [1.0, 2.0]),
        "rib": _series("rib", [0, 10], [1.5]),
    }
    assert rank_at(1, series) == ["rcb", "rib", "norcb"]
    assert rank_at(4, series) == ["rib", "rcb", "norcb"]
    assert rank_at(7, series) == ["norcb", "rib", "rcb"]


def test_rank_at_beyond_series_raises():
    with pytest.raises(ValueError):
        rank_at(10, {"rcb": _series("rcb", [0, 10], [1.0])})


def test_rank_at_invariant_under_common_scaling(rng):
    for _ in range(30):
        gamma = 40
        scale = float(rng.uniform(0.1, 10.0))
        base, scaled = {}, {}
        for name in ("norcb", "rcb", "rib", "hsfc"):
            u = rng.uniform(0.0, 5.0, gamma)
            taus = sorted(rng.choice(np.arange(1, gamma), size=3, replace=False).tolist())
            costs = rng.uniform(0.0, 20.0, 3)
            base[name] = effort_series(u.tolist(), _events(taus, costs), gamma, name)
            scaled[name] = effort_series((u * scale).tolist(), _events(taus, costs * scale), gamma, name)
        for k in range(gamma):
            assert rank_at(k, base) == rank_at(k, scaled)


# cumulative imbalance and modeled time

def test_cumulative_imbalance():
    assert cumulative_imbalance([1.0, 2.0, 3.0]) == [1.0, 3.0, 6.0]
    assert cumulative_imbalance(_trace([0.0] * 4)) == [0.0] * 4


def test_cumulative_imbalance_matches_prefix_sum(rng):
    u = rng.uniform(0.0, 3.0, 200).tolist()
    result = cumulative_imbalance(u)
    assert result == [sum(u[: i + 1]) for i in range(len(u))]
    assert all(b >= a for a, b in zip(result, result[1:]))


def test_modeled_time_examples():
    trace = _trace([0.0] * 10)
    assert modeled_parallel_time(trace, [], 10) == 10.0
    assert modeled_parallel_time(trace, _events([4], [5.0]), 10) == 15.0


def test_modeled_time_equals_interval_decomposition(rng):
    for _ in range(100):
        gamma = int(rng.integers(2, 300))
        trace = _trace(rng.exponential(2.0, gamma).tolist(), rng.uniform(10.0, 50.0, gamma).tolist())
        n_events = int(rng.integers(0, min(gamma - 1, 12) + 1))
        taus = sorted(rng.choice(np.arange(1, gamma), size=n_events, replace=False).tolist())
        events = _events(taus, rng.uniform(0.0, 100.0, n_events).tolist())
        assert modeled_parallel_time(trace, events, gamma) == interval_decomposed_time(trace, events, gamma)


# cost model

def test_lb_cost_examples():
    assert lb_cost(1000, 50, CostModel(c_part=0.0, c_mig=0.0)) == 0.0
    assert lb_cost(1000, 50, CostModel(c_part=0.1, c_mig=2.0)) == pytest.approx(200.0)


def test_lb_cost_is_linear():
    model = CostModel(c_part=0.7, c_mig=3.0)
    assert lb_cost(200, 10, model) - lb_cost(100, 10, model) == pytest.approx(100 * 0.7)
    assert lb_cost(100, 30, model) - lb_cost(100, 10, model) == pytest.approx(20 * 3.0)


def test_lb_cost_rejects_negative_counts():
    with pytest.raises(ValueError):
        lb_cost(-1, 0, CostModel())
