"""Validated experiment configuration models."""
from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from lb_lab.config import (
    COST_PER_MIGRATION,
    COST_PER_PARTICLE,
    DESK_N,
    DESK_P,
    DESK_STEPS,
    DISK_RADIUS,
    DT,
    EPSILON,
    HILBERT_ORDER,
    OMEGA,
    PERIODIC_PERIOD,
    R_CUT_FACTOR,
    RANK_INTERVAL,
    RIB_EIGENGAP,
    SCENARIO_FORCE_STRENGTH,
    SIGMA,
    V0,
    VELOCITY_THRESHOLD,
)
from lb_lab.models.geometry import Rect, Vec2
from lb_lab.models.partition import PartitionerKind


class Scenario(str, Enum):
    CONTRACTION_TOY = "contraction_toy"
    CONTRACTION = "contraction"
    GRAVITY = "gravity"
    ROTATION_CONTRACTION = "rotation_contraction"


class SimConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    domain: tuple[float, float, float, float] = (0.0, 0.0, 1.0, 1.0)
    n_particles: int = Field(DESK_N, ge=1)
    dt: float = Field(DT, gt=0.0)
    steps: int = Field(DESK_STEPS, ge=1)
    epsilon: float = Field(EPSILON, gt=0.0)
    sigma: float = Field(SIGMA, gt=0.0)
    r_cut: float = 0.0
    scenario: Scenario = Scenario.CONTRACTION_TOY
    force_strength: float = Field(-1.0)
    omega: float = OMEGA
    v0: float = Field(V0, ge=0.0)
    disk_radius: float = Field(DISK_RADIUS, gt=0.0)
    min_separation: float = Field(-1.0)
    rng_seed: int = Field(0, ge=0)

    @model_validator(mode="before")
    @classmethod
    def fill_scaled_defaults(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        sigma = float(data.get("sigma") or SIGMA)
        if not data.get("r_cut"):
            data["r_cut"] = R_CUT_FACTOR * sigma
        scenario = data.get("scenario", Scenario.CONTRACTION_TOY)
        scenario = scenario.value if isinstance(scenario, Scenario) else str(scenario)
        if data.get("force_strength") is None or float(data["force_strength"]) < 0.0:
            data["force_strength"] = SCENARIO_FORCE_STRENGTH.get(scenario, 0.0)
        if data.get("min_separation") is None or float(data["min_separation"]) < 0.0:
            data["min_separation"] = 2.0 ** (1.0 / 6.0) * sigma
        return data

    @model_validator(mode="after")
    def check_invariants(self) -> SimConfig:
        if self.r_cut < self.sigma:
            raise ValueError(f"r_cut ({self.r_cut}) must be >= sigma ({self.sigma})")
        x0, y0, x1, y1 = self.domain
        if not (x1 > x0 and y1 > y0):
            raise ValueError(f"domain {self.domain} must have positive width and height")
        return self

    @property
    def rect(self) -> Rect:
        x0, y0, x1, y1 = self.domain
        return Rect(Vec2(x0, y0), Vec2(x1, y1))


class CostModel(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    c_part: float = Field(COST_PER_PARTICLE, ge=0.0)
    c_mig: float = Field(COST_PER_MIGRATION, ge=0.0)


class CriterionSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["periodic", "automatic"] = "periodic"
    period: int = Field(PERIODIC_PERIOD, ge=1)
    smoothing_window: int = Field(1, ge=1)

    @classmethod
    def parse(cls, text: str, smoothing_window: int = 1) -> CriterionSpec:
        """Accepts `periodic:<p>`, `auto` or `automatic`."""
        value = text.strip().lower()
        if value in ("auto", "automatic"):
            return cls(kind="automatic", smoothing_window=smoothing_window)
        if value.startswith("periodic"):
            _, _, period = value.partition(":")
            try:
                return cls(kind="periodic", period=int(period) if period else PERIODIC_PERIOD, smoothing_window=smoothing_window)
            except ValueError:
                raise ValueError(f"Invalid periodic criterion '{text}'") from None
        raise ValueError(f"Unknown criterion '{text}' (expected periodic:<p> or auto)")

    def describe(self) -> str:
        return f"periodic:{self.period}" if self.kind == "periodic" else "auto"


class ExperimentSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    sim: SimConfig = Field(default_factory=SimConfig)
    n_parts: int = Field(DESK_P, ge=1)
    partitioner: PartitionerKind = PartitionerKind.NORCB
    criterion: CriterionSpec = Field(default_factory=CriterionSpec)
    cost_model: CostModel = Field(default_factory=CostModel)
    threshold: float = Field(VELOCITY_THRESHOLD, gt=0.0)
    hilbert_order: int = Field(HILBERT_ORDER, ge=1, le=16)
    eigengap: float = Field(RIB_EIGENGAP, ge=0.0)
    output_dir: Optional[Path] = None
    rank_interval: int = Field(RANK_INTERVAL, ge=1)
    emit_rank_work: bool = False
    label: Optional[str] = None

    @field_validator("partitioner", mode="before")
    @classmethod
    def parse_partitioner(cls, value: Any) -> Any:
        return PartitionerKind.parse(value) if isinstance(value, str) else value

    @model_validator(mode="after")
    def check_parts(self) -> ExperimentSpec:
        if self.partitioner.is_bisection and self.n_parts & (self.n_parts - 1):
            raise ValueError(f"{self.partitioner.value} needs a power-of-two P, got {self.n_parts}")
        if self.n_parts > self.sim.n_particles:
            raise ValueError(f"P={self.n_parts} exceeds N={self.sim.n_particles}")
        return self

    @property
    def name(self) -> str:
        return self.label or self.partitioner.value


# Flat key/value presets, same schema as the config files.
PRESETS: dict[str, dict[str, str]] = {
    "contraction_toy": {
        "scenario": "contraction_toy", "n": "5000", "p": "16", "steps": "3000",
        "sigma": "0.002", "criterion": "periodic:600",
    },
    "contraction": {
        "scenario": "contraction", "n": "5000", "p": "16", "steps": "3000",
        "sigma": "0.002", "criterion": "auto",
    },
    "gravity": {
        "scenario": "gravity", "n": "5000", "p": "16", "steps": "3000",
        "sigma": "0.002", "criterion": "auto",
    },
    "rotation_contraction": {
        "scenario": "rotation_contraction", "n": "5000", "p": "16", "steps": "3000",
        "sigma": "0.002", "criterion": "auto",
    },
    "contraction_toy_full": {
        "scenario": "contraction_toy", "n": "10000", "p": "64", "steps": "5000",
        "sigma": "0.001", "criterion": "periodic:600",
    },
    "contraction_full": {
        "scenario": "contraction", "n": "40000", "p": "128", "steps": "5000",
        "sigma": "0.001", "criterion": "auto",
    },
    "gravity_full": {
        "scenario": "gravity", "n": "40000", "p": "128", "steps": "5000",
        "sigma": "0.001", "criterion": "auto",
    },
    "rotation_contraction_full": {
        "scenario": "rotation_contraction", "n": "10000", "p": "128", "steps": "5000",
        "sigma": "0.001", "criterion": "auto",
    },
}
