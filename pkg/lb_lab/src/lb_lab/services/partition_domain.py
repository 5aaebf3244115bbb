"""Partitioner domain components.

- Partitioner: interface every partitioning technique implements
- BisectionPartitioner: recursive exact-median bisection shared by the
  tree-based techniques; subclasses only choose the cut axis
- NoRCBPartitioner / RCBPartitioner / RIBPartitioner: the bisection family
- HSFCPartitioner: Hilbert-ordered contiguous chunks
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from lb_lab.config import HILBERT_ORDER, RIB_EIGENGAP, VELOCITY_THRESHOLD
from lb_lab.errors import PartitionError
from lb_lab.models.geometry import Cut, Rect, Vec2
from lb_lab.models.particle import ParticleSet
from lb_lab.models.partition import (
    Assignment,
    HilbertTessellation,
    PartitionerKind,
    PartitionNode,
    PartitionResult,
    PartitionTree,
)
from lb_lab.services.geometry_service import angle_to_y, direction_from_angle, rotate_many, split_keys
from lb_lab.services.selection_service import median_split_mask
from lb_lab.utils.logging import logger

MAX_HSFC_ID = (1 << 31) - 1


def check_request(n: int, n_parts: int, power_of_two: bool) -> None:
    if n == 0:
        raise PartitionError("Cannot partition an empty particle set")
    if n_parts < 1:
        raise PartitionError(f"Number of parts must be positive, got {n_parts}")
    if power_of_two and n_parts & (n_parts - 1):
        raise PartitionError(f"Bisection needs a power-of-two number of parts, got {n_parts}")
    if n_parts > n:
        raise PartitionError(f"Cannot split {n} particles into {n_parts} parts")


def longest_axis_direction(bbox: Rect) -> Vec2:
    """Cut direction orthogonal to the longest side of `bbox`."""
    return Vec2(0.0, 1.0) if bbox.width > bbox.height else Vec2(1.0, 0.0)


def informed_axis(velocities: np.ndarray, threshold: float) -> Optional[Vec2]:
    """Mean velocity, or None when its norm does not exceed `threshold`."""
    if len(velocities) == 0:
        raise ValueError("Mean velocity of an empty particle set is undefined")
    if threshold <= 0.0:
        raise ValueError(f"Velocity threshold must be positive, got {threshold}")
    mean = velocities.mean(axis=0)
    if float(np.hypot(mean[0], mean[1])) > threshold:
        return Vec2.from_array(mean)
    return None


class Partitioner(ABC):
    kind: PartitionerKind

    @abstractmethod
    def partition(self, particles: ParticleSet, n_parts: int) -> PartitionResult:
        raise NotImplementedError()


class BisectionPartitioner(Partitioner):
    def partition(self, particles: ParticleSet, n_parts: int) -> PartitionResult:
        check_request(len(particles), n_parts, power_of_two=True)
        ranks = np.empty(len(particles), dtype=np.int64)
        root = self._bisect(particles, np.arange(len(particles)), 0, n_parts, ranks)
        tree = PartitionTree(root=root, n_parts=n_parts)
        assignment = Assignment(ids=particles.ids.copy(), ranks=ranks, n_parts=n_parts)
        return PartitionResult(kind=self.kind, assignment=assignment, tessellation=tree, tree=tree)

    def _bisect(self, particles: ParticleSet, idx: np.ndarray, lo: int, hi: int, ranks: np.ndarray) -> PartitionNode:
        if hi - lo == 1:
            ranks[idx] = lo
            return PartitionNode(lo=lo, hi=hi)
        pos = particles.pos[idx]
        direction, keys = self.cut_axis(pos, particles.vel[idx])
        lower, median = median_split_mask(keys, particles.ids[idx])
        cut = Cut(origin=Vec2.from_array(pos[median]), direction=direction)
        mid = (lo + hi) // 2
        left = self._bisect(particles, idx[lower], lo, mid, ranks)
        right = self._bisect(particles, idx[~lower], mid, hi, ranks)
        return PartitionNode(lo=lo, hi=hi, cut=cut, left=left, right=right)

    @staticmethod
    def axis_aligned(pos: np.ndarray) -> tuple[Vec2, np.ndarray]:
        direction = longest_axis_direction(Rect.from_points(pos))
        return direction, split_keys(pos, direction)

    @abstractmethod
    def cut_axis(self, pos: np.ndarray, vel: np.ndarray) -> tuple[Vec2, np.ndarray]:
        """Return the cut direction and the per-point split keys."""
        raise NotImplementedError()


class RCBPartitioner(BisectionPartitioner):
    kind = PartitionerKind.RCB

    def cut_axis(self, pos: np.ndarray, vel: np.ndarray) -> tuple[Vec2, np.ndarray]:
        return self.axis_aligned(pos)


class NoRCBPartitioner(BisectionPartitioner):
    """Bisects parallel to the mean velocity of each subdomain."""

    kind = PartitionerKind.NORCB

    def __init__(self, threshold: float = VELOCITY_THRESHOLD) -> None:
        if threshold <= 0.0:
            raise PartitionError(f"Velocity threshold must be positive, got {threshold}")
        self.threshold = threshold

    def cut_axis(self, pos: np.ndarray, vel: np.ndarray) -> tuple[Vec2, np.ndarray]:
        mean = informed_axis(vel, self.threshold)
        if mean is None:
            logger.debug(f"Mean velocity below {self.threshold} over {len(pos)} particles; cutting along the longest axis")
            return self.axis_aligned(pos)
        alpha = angle_to_y(mean)
        return direction_from_angle(alpha), rotate_many(pos, alpha)[:, 0]


class RIBPartitioner(BisectionPartitioner):
    """Splits along the principal axis of the position covariance."""

    kind = PartitionerKind.RIB

    def __init__(self, eigengap: float = RIB_EIGENGAP) -> None:
        self.eigengap = eigengap

    def cut_axis(self, pos: np.ndarray, vel: np.ndarray) -> tuple[Vec2, np.ndarray]:
        centered = pos - pos.mean(axis=0)
        cov = centered.T @ centered / len(pos)
        eigenvalues, eigenvectors = np.linalg.eigh(cov)
        if eigenvalues[1] - eigenvalues[0] < self.eigengap:
            return self.axis_aligned(pos)
        e = eigenvectors[:, 1]
        e = e / np.hypot(e[0], e[1])
        if e[0] < 0.0 or (e[0] == 0.0 and e[1] < 0.0):
            e = -e
        # the cut line is orthogonal to the principal axis, so keys are projections onto it
        direction = Vec2(float(-e[1]), float(e[0]))
        return direction, split_keys(pos, direction)


class HSFCPartitioner(Partitioner):
    kind = PartitionerKind.HSFC

    def __init__(self, domain: Optional[Rect] = None, order: int = HILBERT_ORDER) -> None:
        self.domain = domain
        self.order = order

    def partition(self, particles: ParticleSet, n_parts: int) -> PartitionResult:
        n = len(particles)
        check_request(n, n_parts, power_of_two=False)
        if particles.ids.min() < 0 or particles.ids.max() > MAX_HSFC_ID:
            raise PartitionError(f"HSFC needs particle ids in [0, {MAX_HSFC_ID}]")
        domain = self.domain if self.domain is not None else Rect.from_points(particles.pos)

        curve = HilbertTessellation(domain=domain, order=self.order, boundaries=np.empty(0, dtype=np.uint64), n_parts=n_parts)
        keys = curve.keys(particles.pos, particles.ids)
        order = np.argsort(keys, kind="stable")

        sizes = np.full(n_parts, n // n_parts, dtype=np.int64)
        sizes[: n % n_parts] += 1
        starts = np.concatenate(([0], np.cumsum(sizes)[:-1]))
        ranks = np.empty(n, dtype=np.int64)
        ranks[order] = np.repeat(np.arange(n_parts, dtype=np.int64), sizes)

        tessellation = HilbertTessellation(domain=domain, order=self.order, boundaries=keys[order][starts[1:]], n_parts=n_parts)
        assignment = Assignment(ids=particles.ids.copy(), ranks=ranks, n_parts=n_parts)
        return PartitionResult(kind=self.kind, assignment=assignment, tessellation=tessellation)


def make_partitioner(
    kind: PartitionerKind,
    *,
    threshold: float = VELOCITY_THRESHOLD,
    eigengap: float = RIB_EIGENGAP,
    domain: Optional[Rect] = None,
    hilbert_order: int = HILBERT_ORDER,
) -> Partitioner:
    if kind is PartitionerKind.NORCB:
        return NoRCBPartitioner(threshold)
    if kind is PartitionerKind.RCB:
        return RCBPartitioner()
    if kind is PartitionerKind.RIB:
        return RIBPartitioner(eigengap)
    return HSFCPartitioner(domain, hilbert_order)
