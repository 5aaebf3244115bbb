"""Imbalance, criteria, effort and modeled-time computations.

Sums over iterations stand for the integrals of the continuous model, one
imbalance sample per iteration. Totals use math.fsum, so any regrouping of
the same terms (e.g. per load-balancing interval) gives the same result.
"""
from __future__ import annotations

import math
from itertools import accumulate
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from lb_lab.models.experiment import CostModel
from lb_lab.models.trace import EffortInterval, EffortSeries, IterationRecord, LbEvent
from lb_lab.services.lb_domain import AutomaticCriterion, PeriodicCriterion

TraceLike = Sequence[Union[IterationRecord, float]]


def _u_values(trace: TraceLike) -> list[float]:
    return [float(item.u) if isinstance(item, IterationRecord) else float(item) for item in trace]


def imbalance(work: Sequence[float]) -> float:
    """Slowest rank minus the mean."""
    return IterationRecord.from_work(0, np.asarray(work, dtype=float)).u


def periodic_criterion(t: int, period: int) -> bool:
    return PeriodicCriterion(period).should_balance(t, 0.0)


def automatic_criterion(u_history: Sequence[float], cost: float) -> bool:
    """Whether the crossing holds at tau = len(u_history)."""
    if cost < 0.0:
        raise ValueError(f"Load-balancing cost must be >= 0, got {cost}")
    criterion = AutomaticCriterion()
    for u in u_history:
        criterion.observe(float(u))
    return criterion.should_balance(len(u_history), cost)


def first_trigger(u_series: Sequence[float], cost: float) -> Optional[int]:
    """First tau (1-based) at which the automatic criterion fires, if any."""
    criterion = AutomaticCriterion()
    for tau, u in enumerate(u_series, start=1):
        criterion.observe(float(u))
        if criterion.should_balance(tau, cost):
            return tau
    return None


def effort(trace: TraceLike, cost: float) -> float:
    """Average per-iteration effort of one interval: (sum u + C) / length."""
    u = _u_values(trace)
    if not u:
        raise ValueError("Effort of an empty interval is undefined")
    return math.fsum([*u, cost]) / len(u)


def _boundaries(events: Sequence[LbEvent], gamma: int) -> list[int]:
    taus = [e.tau for e in events]
    if any(b <= a for a, b in zip(taus, taus[1:])):
        raise ValueError("Load-balancing events must be strictly increasing in tau")
    if taus and not (0 < taus[0] and taus[-1] < gamma):
        raise ValueError(f"Event taus must lie in (0, {gamma})")
    return [0, *taus, gamma]


def _interval_costs(events: Sequence[LbEvent]) -> list[float]:
    # iteration 0 partitions without charge
    return [0.0, *(e.cost for e in events)]


def effort_series(trace: TraceLike, events: Sequence[LbEvent], gamma: int, algorithm: str) -> EffortSeries:
    u = _u_values(trace)
    if len(u) < gamma:
        raise ValueError(f"Trace has {len(u)} iterations, expected {gamma}")
    bounds = _boundaries(events, gamma)
    intervals = tuple(
        EffortInterval(start, end, effort(u[start:end], cost))
        for start, end, cost in zip(bounds, bounds[1:], _interval_costs(events))
    )
    return EffortSeries(algorithm=algorithm, intervals=intervals)


def rank_at(k: int, series: Mapping[str, EffortSeries]) -> list[str]:
    """Algorithms ordered by the effort of their interval enclosing k."""
    efforts = {name: s.interval_at(k).effort for name, s in series.items()}
    return sorted(efforts, key=lambda name: (efforts[name], name))


def cumulative_imbalance(trace: TraceLike) -> list[float]:
    return list(accumulate(_u_values(trace)))


def _mu_values(trace: TraceLike) -> list[float]:
    return [float(item.mu) for item in trace if isinstance(item, IterationRecord)]


def modeled_parallel_time(trace: Sequence[IterationRecord], events: Sequence[LbEvent], gamma: int) -> float:
    """Sum of imbalance, balancing costs and mean work over [0, gamma)."""
    window = [r for r in trace if r.t < gamma]
    return math.fsum([*_u_values(window), *(e.cost for e in events if e.tau < gamma), *_mu_values(window)])


def interval_decomposed_time(trace: Sequence[IterationRecord], events: Sequence[LbEvent], gamma: int) -> float:
    """Same total, assembled interval by interval."""
    window = [r for r in trace if r.t < gamma]
    bounds = _boundaries(events, gamma)
    terms: list[float] = []
    for start, end, cost in zip(bounds, bounds[1:], _interval_costs(events)):
        terms.extend(r.u for r in window if start <= r.t < end)
        terms.append(cost)
    terms.extend(_mu_values(window))
    return math.fsum(terms)


def lb_cost(n_particles: int, migrated: int, cost_model: CostModel) -> float:
    if n_particles < 0 or migrated < 0:
        raise ValueError("Particle and migration counts must be >= 0")
    return cost_model.c_part * n_particles + cost_model.c_mig * migrated
