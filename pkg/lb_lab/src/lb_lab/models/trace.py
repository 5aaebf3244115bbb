"""Per-iteration records, load-balancing events and effort series."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from lb_lab.models.partition import PartitionerKind


@dataclass(frozen=True)
class IterationRecord:
    t: int
    work: np.ndarray
    max_w: float
    mu: float
    u: float

    @classmethod
    def from_work(cls, t: int, work: np.ndarray) -> IterationRecord:
        work = np.asarray(work, dtype=float)
        if len(work) == 0:
            raise ValueError("Work vector must not be empty")
        max_w = float(work.max())
        # mean can round above max for near-constant vectors
        mu = min(float(work.mean()), max_w)
        return cls(t=t, work=work, max_w=max_w, mu=mu, u=max_w - mu)


@dataclass(frozen=True)
class LbEvent:
    tau: int
    cost: float
    algorithm: PartitionerKind
    migrated: int


@dataclass(frozen=True)
class EffortInterval:
    tau_start: int
    tau_end: int
    effort: float


@dataclass(frozen=True)
class EffortSeries:
    algorithm: str
    intervals: tuple[EffortInterval, ...]

    def interval_at(self, k: int) -> EffortInterval:
        for interval in self.intervals:
            if interval.tau_start <= k < interval.tau_end:
                return interval
        raise ValueError(f"Iteration {k} is outside the effort series of {self.algorithm}")

    @property
    def end(self) -> int:
        return self.intervals[-1].tau_end if self.intervals else 0


@dataclass
class RunResult:
    label: str
    trace: list[IterationRecord]
    events: list[LbEvent]
    effort: EffortSeries
    modeled_time: float
    migrations: list[int] = field(default_factory=list)
    seed: Optional[int] = None
    config_echo: dict = field(default_factory=dict)

    @property
    def lb_call_count(self) -> int:
        return len(self.events)

    @property
    def u(self) -> list[float]:
        return [record.u for record in self.trace]

    @property
    def final_cumulative_imbalance(self) -> float:
        return float(sum(self.u))

    @property
    def gamma(self) -> int:
        return len(self.trace)

    @property
    def total_migrations(self) -> int:
        return int(sum(self.migrations))
