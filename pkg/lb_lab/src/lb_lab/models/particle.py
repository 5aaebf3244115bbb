"""Particle state stored as parallel numpy arrays."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from lb_lab.models.geometry import Vec2


@dataclass(frozen=True)
class Particle:
    id: int
    position: Vec2
    velocity: Vec2


@dataclass
class ParticleSet:
    """Structure-of-arrays particle container.

    `force` holds the last evaluated total force (unit mass), which velocity
    Verlet needs for its opening half-kick.
    """

    ids: np.ndarray
    pos: np.ndarray
    vel: np.ndarray
    force: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        self.ids = np.asarray(self.ids, dtype=np.int64)
        self.pos = np.asarray(self.pos, dtype=float).reshape(-1, 2)
        self.vel = np.asarray(self.vel, dtype=float).reshape(-1, 2)
        n = len(self.ids)
        if self.force is None:
            self.force = np.zeros((n, 2))
        else:
            self.force = np.asarray(self.force, dtype=float).reshape(-1, 2)
        if not (len(self.pos) == len(self.vel) == len(self.force) == n):
            raise ValueError("ids, pos, vel and force must have the same length")

    def __len__(self) -> int:
        return len(self.ids)

    def subset(self, index: np.ndarray) -> ParticleSet:
        return ParticleSet(self.ids[index], self.pos[index], self.vel[index], self.force[index])

    def copy(self) -> ParticleSet:
        return replace(self, ids=self.ids.copy(), pos=self.pos.copy(), vel=self.vel.copy(), force=self.force.copy())

    def particle(self, i: int) -> Particle:
        return Particle(int(self.ids[i]), Vec2.from_array(self.pos[i]), Vec2.from_array(self.vel[i]))

    @classmethod
    def from_particles(cls, particles: list[Particle]) -> ParticleSet:
        return cls(
            ids=np.array([p.id for p in particles], dtype=np.int64),
            pos=np.array([[p.position.x, p.position.y] for p in particles], dtype=float).reshape(-1, 2),
            vel=np.array([[p.velocity.x, p.velocity.y] for p in particles], dtype=float).reshape(-1, 2),
        )
