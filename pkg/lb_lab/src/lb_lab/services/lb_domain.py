"""Load-balancing trigger criteria.

Criteria are stateful observers used by the run loop: `observe` receives the
imbalance of every recorded iteration, `should_balance` is asked once per
iteration, and `reset` is called after each load-balancing event.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from collections import deque

from lb_lab.models.experiment import CriterionSpec


class Criterion(ABC):
    @abstractmethod
    def observe(self, u: float) -> None:
        raise NotImplementedError()

    @abstractmethod
    def should_balance(self, t: int, cost: float) -> bool:
        raise NotImplementedError()

    def reset(self) -> None:
        pass


class PeriodicCriterion(Criterion):
    def __init__(self, period: int) -> None:
        if period < 1:
            raise ValueError(f"Period must be >= 1, got {period}")
        self.period = period

    def observe(self, u: float) -> None:
        pass

    def should_balance(self, t: int, cost: float) -> bool:
        return t > 0 and t % self.period == 0


class AutomaticCriterion(Criterion):
    """Fires once the imbalance accumulated since the last balance pays for a new one.

    With tau samples since the last balance the test is
    tau*u(tau) - sum(u) >= C, with a strictly positive left side.
    """

    def __init__(self, smoothing_window: int = 1) -> None:
        if smoothing_window < 1:
            raise ValueError(f"Smoothing window must be >= 1, got {smoothing_window}")
        self.smoothing_window = smoothing_window
        self.reset()

    def reset(self) -> None:
        self._raw: deque[float] = deque(maxlen=self.smoothing_window)
        self._tau = 0
        self._sum = 0.0
        self._last = 0.0

    def observe(self, u: float) -> None:
        self._raw.append(u)
        value = u if self.smoothing_window == 1 else sum(self._raw) / len(self._raw)
        self._tau += 1
        self._sum += value
        self._last = value

    @property
    def pressure(self) -> float:
        """Left side of the trigger inequality."""
        return self._tau * self._last - self._sum

    def should_balance(self, t: int, cost: float) -> bool:
        if self._tau == 0:
            return False
        lhs = self.pressure
        return lhs > 0.0 and lhs >= cost


def make_criterion(spec: CriterionSpec) -> Criterion:
    if spec.kind == "periodic":
        return PeriodicCriterion(spec.period)
    return AutomaticCriterion(spec.smoothing_window)
