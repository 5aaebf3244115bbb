"""N-body domain components.

- CellGrid: cell list over the domain and half-shell neighbour pairs
- LennardJones: truncated, clamped pair force and matching potential
- RadialAttraction / UniformField: external per-particle forces
- VerletIntegrator: velocity-Verlet step with reflective walls
- WorkCounter: per-rank interaction counts with ghost double charge
- ScenarioFactory: initial particle sets for the four experiments
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Protocol

import numpy as np

from lb_lab.config import FORCE_CLAMP_FACTOR
from lb_lab.errors import ConfigError
from lb_lab.models.experiment import Scenario, SimConfig
from lb_lab.models.geometry import Rect, Vec2
from lb_lab.models.particle import ParticleSet
from lb_lab.utils.logging import logger

HALF_SHELL = ((0, 0), (1, 0), (-1, 1), (0, 1), (1, 1))
MAX_FOLDS = 64
MAX_PLACEMENT_ATTEMPTS = 200


@dataclass(frozen=True)
class NeighborPairs:
    """Unordered pairs (i < j within a cell) closer than the cut-off.

    `delta` is pos[i] - pos[j].
    """

    i: np.ndarray
    j: np.ndarray
    delta: np.ndarray
    r: np.ndarray

    def __len__(self) -> int:
        return len(self.i)


class CellGrid:
    def __init__(self, pos: np.ndarray, domain: Rect, cell_size: float) -> None:
        if cell_size <= 0.0:
            raise ValueError(f"Cell size must be positive, got {cell_size}")
        self.cell_size = cell_size
        self.domain = domain
        self.nx = max(1, int(math.ceil(domain.width / cell_size)))
        self.ny = max(1, int(math.ceil(domain.height / cell_size)))
        self._pos = pos
        self.cx = np.clip(np.floor((pos[:, 0] - domain.min.x) / cell_size).astype(np.int64), 0, self.nx - 1)
        self.cy = np.clip(np.floor((pos[:, 1] - domain.min.y) / cell_size).astype(np.int64), 0, self.ny - 1)
        cell = self.cx * self.ny + self.cy
        self.order = np.argsort(cell, kind="stable")
        self.counts = np.bincount(cell, minlength=self.nx * self.ny)
        self.starts = np.cumsum(self.counts) - self.counts
        self._pairs: dict[float, NeighborPairs] = {}

    @property
    def cells(self) -> dict[tuple[int, int], list[int]]:
        """Occupied cells mapped to particle indices."""
        out: dict[tuple[int, int], list[int]] = {}
        for idx in self.order.tolist():
            out.setdefault((int(self.cx[idx]), int(self.cy[idx])), []).append(idx)
        return out

    def pairs(self, r_cut: float) -> NeighborPairs:
        if r_cut > self.cell_size:
            raise ValueError(f"r_cut {r_cut} exceeds the cell size {self.cell_size}")
        cached = self._pairs.get(r_cut)
        if cached is not None:
            return cached

        chunks_i = []
        chunks_j = []
        for dx, dy in HALF_SHELL:
            ncx = self.cx + dx
            ncy = self.cy + dy
            valid = (ncx >= 0) & (ncx < self.nx) & (ncy >= 0) & (ncy < self.ny)
            src = np.nonzero(valid)[0]
            target = ncx[valid] * self.ny + ncy[valid]
            cnt = self.counts[target]
            total = int(cnt.sum())
            if total == 0:
                continue
            i = np.repeat(src, cnt)
            first = np.repeat(self.starts[target], cnt)
            offsets = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
            j = self.order[first + offsets]
            if dx == 0 and dy == 0:
                keep = j > i
                i = i[keep]
                j = j[keep]
            chunks_i.append(i)
            chunks_j.append(j)

        if chunks_i:
            i = np.concatenate(chunks_i)
            j = np.concatenate(chunks_j)
        else:
            i = j = np.empty(0, dtype=np.int64)
        delta = self._pos[i] - self._pos[j]
        r = np.hypot(delta[:, 0], delta[:, 1])
        within = r < r_cut
        pairs = NeighborPairs(i=i[within], j=j[within], delta=delta[within], r=r[within])
        self._pairs[r_cut] = pairs
        return pairs


class LennardJones:
    def __init__(self, epsilon: float, sigma: float, r_cut: float, clamp_factor: float = FORCE_CLAMP_FACTOR) -> None:
        self.epsilon = epsilon
        self.sigma = sigma
        self.r_cut = r_cut
        self.r_clamp = clamp_factor * sigma

    def magnitude(self, r: np.ndarray) -> np.ndarray:
        """Signed radial force magnitude; positive is repulsive."""
        r = np.asarray(r, dtype=float)
        r_eff = np.maximum(r, self.r_clamp)
        sr6 = (self.sigma / r_eff) ** 6
        mag = 24.0 * self.epsilon * (2.0 * sr6 * sr6 - sr6) / r_eff
        return np.where(r < self.r_cut, mag, 0.0)

    def potential(self, r: np.ndarray) -> np.ndarray:
        """Truncated potential, continued linearly inside the clamp radius."""
        r = np.asarray(r, dtype=float)
        r_eff = np.maximum(r, self.r_clamp)
        sr6 = (self.sigma / r_eff) ** 6
        u = 4.0 * self.epsilon * (sr6 * sr6 - sr6)
        u = u + np.where(r < self.r_clamp, self.magnitude(self.r_clamp) * (self.r_clamp - r), 0.0)
        return np.where(r < self.r_cut, u, 0.0)

    def force(self, delta: Vec2) -> Vec2:
        r = delta.norm()
        if r == 0.0:
            raise ValueError("Lennard-Jones force is undefined for coincident particles")
        if r >= self.r_cut:
            return Vec2(0.0, 0.0)
        scale = float(self.magnitude(np.array(r))) / r
        return Vec2(delta.x * scale, delta.y * scale)

    def pair_forces(self, pairs: NeighborPairs, n: int) -> np.ndarray:
        mag = self.magnitude(pairs.r)
        # coincident pairs have no direction and contribute nothing
        scale = np.divide(mag, pairs.r, out=np.zeros_like(mag), where=pairs.r > 0.0)
        fx = pairs.delta[:, 0] * scale
        fy = pairs.delta[:, 1] * scale
        forces = np.empty((n, 2))
        forces[:, 0] = np.bincount(pairs.i, weights=fx, minlength=n) - np.bincount(pairs.j, weights=fx, minlength=n)
        forces[:, 1] = np.bincount(pairs.i, weights=fy, minlength=n) - np.bincount(pairs.j, weights=fy, minlength=n)
        return forces


class ExternalForce(Protocol):
    def __call__(self, pos: np.ndarray) -> np.ndarray: ...

    def potential(self, pos: np.ndarray) -> np.ndarray: ...


class NoExternalForce:
    def __call__(self, pos: np.ndarray) -> np.ndarray:
        return np.zeros_like(pos)

    def potential(self, pos: np.ndarray) -> np.ndarray:
        return np.zeros(len(pos))


class RadialAttraction:
    """Constant-magnitude pull towards `center`."""

    def __init__(self, center: Vec2, strength: float) -> None:
        self.center = center
        self.strength = strength

    def __call__(self, pos: np.ndarray) -> np.ndarray:
        offset = pos - self.center.as_array()
        dist = np.hypot(offset[:, 0], offset[:, 1])
        scale = np.divide(-self.strength, dist, out=np.zeros_like(dist), where=dist > 0.0)
        return offset * scale[:, None]

    def potential(self, pos: np.ndarray) -> np.ndarray:
        offset = pos - self.center.as_array()
        return self.strength * np.hypot(offset[:, 0], offset[:, 1])


class UniformField:
    def __init__(self, force: Vec2) -> None:
        self.force = force

    def __call__(self, pos: np.ndarray) -> np.ndarray:
        return np.broadcast_to(self.force.as_array(), pos.shape).copy()

    def potential(self, pos: np.ndarray) -> np.ndarray:
        return -(pos @ self.force.as_array())


def reflect(pos: np.ndarray, vel: np.ndarray, domain: Rect) -> None:
    """Fold positions back into `domain` in place, negating normal velocity per bounce."""
    bounds = ((0, domain.min.x, domain.max.x), (1, domain.min.y, domain.max.y))
    for axis, lo, hi in bounds:
        for _ in range(MAX_FOLDS):
            below = pos[:, axis] < lo
            above = pos[:, axis] > hi
            if not (below.any() or above.any()):
                break
            pos[below, axis] = 2.0 * lo - pos[below, axis]
            pos[above, axis] = 2.0 * hi - pos[above, axis]
            vel[below | above, axis] *= -1.0
        else:
            np.clip(pos[:, axis], lo, hi, out=pos[:, axis])


class VerletIntegrator:
    def __init__(self, config: SimConfig, external: Optional[ExternalForce] = None) -> None:
        self.config = config
        self.domain = config.rect
        self.lj = LennardJones(config.epsilon, config.sigma, config.r_cut)
        self.external = external if external is not None else NoExternalForce()

    def build_grid(self, pos: np.ndarray) -> CellGrid:
        return CellGrid(pos, self.domain, self.config.r_cut)

    def total_force(self, pos: np.ndarray, grid: CellGrid) -> np.ndarray:
        pairs = grid.pairs(self.config.r_cut)
        return self.lj.pair_forces(pairs, len(pos)) + self.external(pos)

    def initialize(self, particles: ParticleSet) -> tuple[ParticleSet, CellGrid]:
        grid = self.build_grid(particles.pos)
        state = particles.copy()
        state.force = self.total_force(state.pos, grid)
        return state, grid

    def step(self, particles: ParticleSet) -> tuple[ParticleSet, CellGrid]:
        dt = self.config.dt
        vel = particles.vel + 0.5 * dt * particles.force
        pos = particles.pos + dt * vel
        reflect(pos, vel, self.domain)
        grid = self.build_grid(pos)
        force = self.total_force(pos, grid)
        vel = vel + 0.5 * dt * force
        return ParticleSet(ids=particles.ids, pos=pos, vel=vel, force=force), grid


class WorkCounter:
    """Interaction counts per rank; cross-rank pairs charge both owners."""

    def __init__(self, r_cut: float) -> None:
        self.r_cut = r_cut

    def count(self, ranks: np.ndarray, grid: CellGrid, n_parts: int) -> np.ndarray:
        pairs = grid.pairs(self.r_cut)
        ri = ranks[pairs.i]
        rj = ranks[pairs.j]
        cross = ri != rj
        work = np.bincount(ri, minlength=n_parts) + np.bincount(rj[cross], minlength=n_parts)
        return work.astype(float)


class ScenarioFactory:
    def __init__(self, config: SimConfig) -> None:
        self.config = config
        self.domain = config.rect
        self.rng = np.random.Generator(np.random.PCG64(config.rng_seed))

    @property
    def center(self) -> Vec2:
        return self.domain.center

    def build(self) -> tuple[ParticleSet, ExternalForce]:
        cfg = self.config
        n = cfg.n_particles
        ids = np.arange(n, dtype=np.int64)

        if cfg.scenario is Scenario.GRAVITY:
            x0, y0 = self.domain.min.x, self.domain.min.y
            width, height = 0.5 * self.domain.width, self.domain.height

            def draw(size: int) -> np.ndarray:
                u = self.rng.random((size, 2))
                return np.column_stack((x0 + width * u[:, 0], y0 + height * u[:, 1]))

            pos = self._place(draw, n, width * height)
            vel = self.rng.uniform(-cfg.v0, cfg.v0, size=(n, 2))
            return ParticleSet(ids=ids, pos=pos, vel=vel), UniformField(Vec2(0.0, -cfg.force_strength))

        radius = self._disk_radius()
        c = self.center.as_array()

        def draw(size: int) -> np.ndarray:
            u = self.rng.random((size, 2))
            r = radius * np.sqrt(u[:, 0])
            theta = 2.0 * math.pi * u[:, 1]
            return np.column_stack((c[0] + r * np.cos(theta), c[1] + r * np.sin(theta)))

        pos = self._place(draw, n, math.pi * radius * radius)
        if cfg.scenario is Scenario.ROTATION_CONTRACTION:
            offset = pos - c
            # omega * perp(unit(x - c)) * |x - c| is a rigid rotation
            vel = cfg.omega * np.column_stack((-offset[:, 1], offset[:, 0]))
        else:
            vel = np.zeros((n, 2))
        return ParticleSet(ids=ids, pos=pos, vel=vel), RadialAttraction(self.center, cfg.force_strength)

    def _disk_radius(self) -> float:
        limit = 0.5 * min(self.domain.width, self.domain.height)
        if self.config.disk_radius > limit:
            raise ConfigError(f"disk_radius {self.config.disk_radius} does not fit the domain (max {limit})")
        return self.config.disk_radius

    def _place(self, draw, n: int, area: float) -> np.ndarray:
        """Uniform draws conditioned on a hard-core minimum separation."""
        min_sep = self.config.min_separation
        if min_sep <= 0.0:
            return draw(n)
        ceiling = 0.7 * math.sqrt(area / n)
        if min_sep > ceiling:
            logger.warning(f"{n} particles cannot keep a separation of {min_sep:.3g}; relaxing to {ceiling:.3g}")
            min_sep = ceiling

        grid: dict[tuple[int, int], list[int]] = {}
        placed = np.empty((n, 2))
        count = 0
        min_sep2 = min_sep * min_sep
        for _ in range(MAX_PLACEMENT_ATTEMPTS):
            for x, y in draw(n).tolist():
                key = (int(x // min_sep), int(y // min_sep))
                clash = False
                for gx in (key[0] - 1, key[0], key[0] + 1):
                    for gy in (key[1] - 1, key[1], key[1] + 1):
                        for k in grid.get((gx, gy), ()):
                            dx = placed[k, 0] - x
                            dy = placed[k, 1] - y
                            if dx * dx + dy * dy < min_sep2:
                                clash = True
                                break
                        if clash:
                            break
                    if clash:
                        break
                if clash:
                    continue
                placed[count] = (x, y)
                grid.setdefault(key, []).append(count)
                count += 1
                if count == n:
                    return placed
        raise ConfigError(f"Could only place {count} of {n} particles with separation {min_sep:.3g}")
