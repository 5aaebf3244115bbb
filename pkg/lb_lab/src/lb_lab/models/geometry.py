"""2D value types: vectors, oriented cuts and axis-aligned boxes."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

UNIT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"Vec2 components must be finite, got ({self.x}, {self.y})")

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, scale: float) -> Vec2:
        return Vec2(self.x * scale, self.y * scale)

    __rmul__ = __mul__

    def __neg__(self) -> Vec2:
        return Vec2(-self.x, -self.y)

    def dot(self, other: Vec2) -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: Vec2) -> float:
        """z-component of the 3D cross product."""
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def unit(self) -> Vec2:
        n = self.norm()
        if n == 0.0:
            raise ValueError("Cannot normalise a zero vector")
        return Vec2(self.x / n, self.y / n)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    @classmethod
    def from_array(cls, values) -> Vec2:
        return cls(float(values[0]), float(values[1]))


class Side(str, Enum):
    LOWER_OR_EQUAL = "lower_or_equal"
    GREATER = "greater"


@dataclass(frozen=True)
class Cut:
    """Bisection line through `origin` running along unit `direction`."""

    origin: Vec2
    direction: Vec2

    def __post_init__(self) -> None:
        if abs(self.direction.norm() - 1.0) > UNIT_TOLERANCE:
            raise ValueError(f"Cut direction must be a unit vector, got norm {self.direction.norm()!r}")


@dataclass(frozen=True)
class Rect:
    min: Vec2
    max: Vec2

    def __post_init__(self) -> None:
        if self.min.x > self.max.x or self.min.y > self.max.y:
            raise ValueError(f"Invalid Rect: min {self.min} exceeds max {self.max}")

    @property
    def width(self) -> float:
        return self.max.x - self.min.x

    @property
    def height(self) -> float:
        return self.max.y - self.min.y

    @property
    def center(self) -> Vec2:
        return Vec2(0.5 * (self.min.x + self.max.x), 0.5 * (self.min.y + self.max.y))

    def contains(self, p: Vec2) -> bool:
        return self.min.x <= p.x <= self.max.x and self.min.y <= p.y <= self.max.y

    @classmethod
    def from_points(cls, points: np.ndarray) -> Rect:
        """Bounding box of an (n, 2) coordinate array."""
        if len(points) == 0:
            raise ValueError("Bounding box of an empty point set is undefined")
        lo = points.min(axis=0)
        hi = points.max(axis=0)
        return cls(Vec2.from_array(lo), Vec2.from_array(hi))

    @classmethod
    def unit_square(cls) -> Rect:
        return cls(Vec2(0.0, 0.0), Vec2(1.0, 1.0))
