"""N-body simulation service.

Thin wrappers delegating to the nbody domain classes.
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from lb_lab.models.experiment import SimConfig
from lb_lab.models.geometry import Vec2
from lb_lab.models.particle import ParticleSet
from lb_lab.models.partition import Assignment
from lb_lab.services.nbody_domain import (
    CellGrid,
    ExternalForce,
    LennardJones,
    ScenarioFactory,
    VerletIntegrator,
    WorkCounter,
)
from lb_lab.utils.logging import logger


def lj_force(delta: Vec2, epsilon: float, sigma: float, r_cut: float) -> Vec2:
    """Truncated LJ force on a particle at offset `delta` from its neighbour."""
    return LennardJones(epsilon, sigma, r_cut).force(delta)


def lj_potential(r: float, epsilon: float, sigma: float, r_cut: float) -> float:
    return float(LennardJones(epsilon, sigma, r_cut).potential(np.array(r)))


def build_grid(particles: ParticleSet, config: SimConfig) -> CellGrid:
    return CellGrid(particles.pos, config.rect, config.r_cut)


def initialize_forces(particles: ParticleSet, config: SimConfig, external_force: Optional[ExternalForce] = None) -> tuple[ParticleSet, CellGrid]:
    return VerletIntegrator(config, external_force).initialize(particles)


def step(particles: ParticleSet, grid: CellGrid, config: SimConfig, external_force: Optional[ExternalForce] = None) -> ParticleSet:
    """One velocity-Verlet step; opening forces are evaluated on `grid`."""
    integrator = VerletIntegrator(config, external_force)
    state = particles.copy()
    state.force = integrator.total_force(state.pos, grid)
    updated, _ = integrator.step(state)
    return updated


def count_work(particles: ParticleSet, assignment: Assignment, grid: CellGrid, r_cut: float) -> np.ndarray:
    if np.array_equal(assignment.ids, particles.ids):
        ranks = assignment.ranks
    else:
        rank_of = assignment.rank_of
        ranks = np.array([rank_of[int(i)] for i in particles.ids], dtype=np.int64)
    return WorkCounter(r_cut).count(ranks, grid, assignment.n_parts)


def make_scenario(config: SimConfig) -> tuple[ParticleSet, ExternalForce]:
    particles, external = ScenarioFactory(config).build()
    logger.info(f"Built {config.scenario.value} scenario with {len(particles)} particles (seed {config.rng_seed})")
    return particles, external


def kinetic_energy(particles: ParticleSet) -> float:
    return 0.5 * float(np.sum(particles.vel * particles.vel))


def pair_potential_energy(particles: ParticleSet, config: SimConfig, grid: Optional[CellGrid] = None) -> float:
    grid = grid if grid is not None else build_grid(particles, config)
    pairs = grid.pairs(config.r_cut)
    return float(np.sum(LennardJones(config.epsilon, config.sigma, config.r_cut).potential(pairs.r)))
