"""Rotations, angles and point location against oriented cuts.

Every bisection partitioner classifies points through `split_keys`: for a
cut direction d the key of p is d.y*p.x - d.x*p.y, and `side_of` reports
LowerOrEqual exactly when the key of p does not exceed the key of the
cut origin. For d = (sin a, cos a) the key is the x coordinate of p rotated
counter-clockwise by a, which is how NoRCB measures its median.
"""
from __future__ import annotations

import math

import numpy as np

from lb_lab.models.geometry import Cut, Side, Vec2


def angle_to_y(v: Vec2) -> float:
    """Signed CCW angle in (-pi, pi] that turns `v` onto +Y."""
    if v.x == 0.0 and v.y == 0.0:
        raise ValueError("angle_to_y is undefined for the zero vector")
    alpha = math.atan2(v.x, v.y)
    if alpha == -math.pi:
        alpha = math.pi
    return alpha


def rotate(p: Vec2, alpha: float) -> Vec2:
    if not math.isfinite(alpha):
        raise ValueError(f"Rotation angle must be finite, got {alpha!r}")
    c = math.cos(alpha)
    s = math.sin(alpha)
    return Vec2(p.x * c - p.y * s, p.x * s + p.y * c)


def rotate_many(points: np.ndarray, alpha: float) -> np.ndarray:
    """Vectorised `rotate` over an (n, 2) array."""
    c = math.cos(alpha)
    s = math.sin(alpha)
    x = points[:, 0]
    y = points[:, 1]
    return np.column_stack((x * c - y * s, x * s + y * c))


def direction_from_angle(alpha: float) -> Vec2:
    """Unit vector that `rotate(., alpha)` maps onto +Y."""
    return Vec2(math.sin(alpha), math.cos(alpha))


def split_keys(points: np.ndarray, direction: Vec2) -> np.ndarray:
    return points[:, 0] * direction.y - points[:, 1] * direction.x


def side_of(cut: Cut, p: Vec2) -> Side:
    d = cut.direction
    cross = d.x * (p.y - cut.origin.y) - d.y * (p.x - cut.origin.x)
    return Side.LOWER_OR_EQUAL if cross >= 0.0 else Side.GREATER


def lower_or_equal_mask(cut: Cut, points: np.ndarray) -> np.ndarray:
    """Vectorised `side_of`; True where a point is LowerOrEqual."""
    d = cut.direction
    cross = d.x * (points[:, 1] - cut.origin.y) - d.y * (points[:, 0] - cut.origin.x)
    return cross >= 0.0
