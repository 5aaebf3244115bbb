"""Shared fixtures and helpers for the lb_lab test-suite."""
import sys
from pathlib import Path

import numpy as np
import pytest

# Add package source directory to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from lb_lab.models.experiment import CriterionSpec, ExperimentSpec, SimConfig  # noqa: E402
from lb_lab.models.particle import ParticleSet  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: desk-scale acceptance runs (minutes)")


def random_particles(n: int, seed: int, velocity_scale: float = 0.0, width: float = 1.0, height: float = 1.0) -> ParticleSet:
    rng = np.random.default_rng(seed)
    pos = rng.random((n, 2)) * np.array([width, height])
    vel = rng.normal(size=(n, 2)) * velocity_scale
    return ParticleSet(ids=np.arange(n), pos=pos, vel=vel)


def tiny_sim(**overrides) -> SimConfig:
    values = dict(n_particles=200, steps=30, sigma=0.01, scenario="rotation_contraction", rng_seed=7)
    values.update(overrides)
    return SimConfig(**values)


def tiny_spec(sim: SimConfig = None, **overrides) -> ExperimentSpec:
    values = dict(
        sim=sim if sim is not None else tiny_sim(),
        n_parts=4,
        partitioner="rcb",
        criterion=CriterionSpec(kind="periodic", period=7),
        rank_interval=5,
    )
    values.update(overrides)
    return ExperimentSpec(**values)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def moving_particles():
    return random_particles(512, seed=11, velocity_scale=0.5)
