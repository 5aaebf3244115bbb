"""Partitioning service.

Thin wrappers delegating to the partitioner domain classes.
"""
from __future__ import annotations

from typing import Optional

from lb_lab.config import HILBERT_ORDER, RIB_EIGENGAP, VELOCITY_THRESHOLD
from lb_lab.models.geometry import Rect, Vec2
from lb_lab.models.particle import ParticleSet
from lb_lab.models.partition import Assignment, PartitionResult, PartitionTree
from lb_lab.services.partition_domain import (
    HSFCPartitioner,
    NoRCBPartitioner,
    RCBPartitioner,
    RIBPartitioner,
    informed_axis,
    longest_axis_direction,
)
from lb_lab.utils.hilbert import hilbert_index as _hilbert_index
from lb_lab.utils.logging import logger


def _logged(result: PartitionResult, n: int) -> PartitionResult:
    counts = result.assignment.counts()
    logger.debug(
        f"{result.kind.value} partition of {n} particles into {result.assignment.n_parts} parts "
        f"(leaf sizes {int(counts.min())}..{int(counts.max())})"
    )
    return result


def mean_velocity_axis(particles: ParticleSet, bbox: Rect, threshold: float = VELOCITY_THRESHOLD) -> Vec2:
    """Mean velocity if its norm exceeds `threshold`, else the longest-axis fallback."""
    mean = informed_axis(particles.vel, threshold)
    return mean if mean is not None else longest_axis_direction(bbox)


def norcb_partition(particles: ParticleSet, n_parts: int, threshold: float = VELOCITY_THRESHOLD) -> tuple[PartitionTree, Assignment]:
    result = _logged(NoRCBPartitioner(threshold).partition(particles, n_parts), len(particles))
    return result.tree, result.assignment


def rcb_partition(particles: ParticleSet, n_parts: int) -> tuple[PartitionTree, Assignment]:
    result = _logged(RCBPartitioner().partition(particles, n_parts), len(particles))
    return result.tree, result.assignment


def rib_partition(particles: ParticleSet, n_parts: int, eigengap: float = RIB_EIGENGAP) -> tuple[PartitionTree, Assignment]:
    result = _logged(RIBPartitioner(eigengap).partition(particles, n_parts), len(particles))
    return result.tree, result.assignment


def hilbert_index(p: Vec2, bbox: Rect, order: int = HILBERT_ORDER) -> int:
    return _hilbert_index(p, bbox, order)


def hsfc_partition(particles: ParticleSet, n_parts: int, order: int = HILBERT_ORDER, domain: Optional[Rect] = None) -> Assignment:
    return _logged(HSFCPartitioner(domain, order).partition(particles, n_parts), len(particles)).assignment


def locate(tree: PartitionTree, p: Vec2) -> int:
    return tree.locate(p)
