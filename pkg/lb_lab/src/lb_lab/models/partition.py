"""Partitioning results: kinds, bisection trees, assignments, tessellations."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional, Protocol

import numpy as np

from lb_lab.models.geometry import Cut, Rect, Side, Vec2
from lb_lab.services.geometry_service import lower_or_equal_mask, side_of
from lb_lab.utils.hilbert import hilbert_index_many


class PartitionerKind(str, Enum):
    NORCB = "norcb"
    RCB = "rcb"
    RIB = "rib"
    HSFC = "hsfc"

    @property
    def is_bisection(self) -> bool:
        return self is not PartitionerKind.HSFC

    @classmethod
    def parse(cls, value: str) -> PartitionerKind:
        try:
            return cls(value.strip().lower())
        except ValueError:
            choices = ", ".join(k.value for k in cls)
            raise ValueError(f"Unknown partitioner '{value}' (expected one of {choices})") from None


class Tessellation(Protocol):
    """Anything that can map positions to owning ranks."""

    n_parts: int

    def locate_many(self, points: np.ndarray, ids: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class PartitionNode:
    """Internal nodes carry a cut, leaves a rank.

    `lo`/`hi` bound the half-open rank range owned by the subtree.
    """

    lo: int
    hi: int
    cut: Optional[Cut] = None
    left: Optional[PartitionNode] = None
    right: Optional[PartitionNode] = None

    @property
    def is_leaf(self) -> bool:
        return self.cut is None

    @property
    def rank(self) -> int:
        if not self.is_leaf:
            raise ValueError("Only leaves own a rank")
        return self.lo


@dataclass(frozen=True)
class PartitionTree:
    root: PartitionNode
    n_parts: int

    def locate(self, p: Vec2) -> int:
        node = self.root
        while not node.is_leaf:
            node = node.left if side_of(node.cut, p) is Side.LOWER_OR_EQUAL else node.right
        return node.rank

    def locate_many(self, points: np.ndarray, ids: Optional[np.ndarray] = None) -> np.ndarray:
        ranks = np.empty(len(points), dtype=np.int64)
        stack = [(self.root, np.arange(len(points)))]
        while stack:
            node, idx = stack.pop()
            if len(idx) == 0:
                continue
            if node.is_leaf:
                ranks[idx] = node.rank
                continue
            lower = lower_or_equal_mask(node.cut, points[idx])
            stack.append((node.left, idx[lower]))
            stack.append((node.right, idx[~lower]))
        return ranks

    def internal_nodes(self) -> list[PartitionNode]:
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if not node.is_leaf:
                out.append(node)
                stack.extend((node.right, node.left))
        return out

    def leaves(self) -> list[PartitionNode]:
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node)
            else:
                stack.extend((node.right, node.left))
        return out

    @property
    def depth(self) -> int:
        def _depth(node: PartitionNode) -> int:
            return 0 if node.is_leaf else 1 + max(_depth(node.left), _depth(node.right))

        return _depth(self.root)


@dataclass(frozen=True)
class HilbertTessellation:
    """Standing HSFC chunk boundaries.

    `boundaries[r - 1]` is the (index << 32 | id) key of the first particle of
    chunk r, for r in 1..P-1. Keys are uint64: an order-16 index fills the
    upper 32 bits.
    """

    domain: Rect
    order: int
    boundaries: np.ndarray
    n_parts: int

    def keys(self, points: np.ndarray, ids: np.ndarray) -> np.ndarray:
        h = hilbert_index_many(points, self.domain, self.order).astype(np.uint64)
        return (h << np.uint64(32)) | np.asarray(ids, dtype=np.uint64)

    def locate_many(self, points: np.ndarray, ids: np.ndarray) -> np.ndarray:
        return np.searchsorted(self.boundaries, self.keys(points, ids), side="right").astype(np.int64)


@dataclass(frozen=True)
class Assignment:
    """Ranks aligned with `ids` (same order as the partitioned particle set)."""

    ids: np.ndarray
    ranks: np.ndarray
    n_parts: int

    @property
    def rank_of(self) -> Mapping[int, int]:
        return dict(zip(self.ids.tolist(), self.ranks.tolist()))

    def counts(self) -> np.ndarray:
        return np.bincount(self.ranks, minlength=self.n_parts)

    def spread(self) -> int:
        counts = self.counts()
        return int(counts.max() - counts.min())


@dataclass(frozen=True)
class PartitionResult:
    kind: PartitionerKind
    assignment: Assignment
    tessellation: Tessellation
    tree: Optional[PartitionTree] = None
