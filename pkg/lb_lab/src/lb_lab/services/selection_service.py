"""Exact k-th order statistic under the lexicographic (key, id) order.

Quickselect with median-of-three pivoting. Each pass partitions the live
candidates with vectorised comparisons, so a selection over n items costs
O(n) numpy work on average. Ids are unique, so the rank-k item is unique and
the answer does not depend on pivot choices.
"""
from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

_SMALL = 32


class KeyedItem(NamedTuple):
    key: float
    id: int


def _precedes(keys: np.ndarray, ids: np.ndarray, a: int, b: int) -> bool:
    return keys[a] < keys[b] or (keys[a] == keys[b] and ids[a] < ids[b])


def _median_of_three(keys: np.ndarray, ids: np.ndarray, a: int, b: int, c: int) -> int:
    if _precedes(keys, ids, a, b):
        if _precedes(keys, ids, b, c):
            return b
        return c if _precedes(keys, ids, a, c) else a
    if _precedes(keys, ids, a, c):
        return a
    return c if _precedes(keys, ids, b, c) else b


def kth_smallest_index(keys: np.ndarray, ids: np.ndarray, k: int) -> int:
    """Position (into `keys`/`ids`) of the rank-k item."""
    n = len(keys)
    if n == 0:
        raise ValueError("Cannot select from an empty sequence")
    if not 0 <= k < n:
        raise ValueError(f"k={k} out of range for {n} items")

    live = np.arange(n)
    while True:
        m = len(live)
        if m <= _SMALL:
            order = np.lexsort((ids[live], keys[live]))
            return int(live[order[k]])

        pivot = _median_of_three(keys, ids, int(live[0]), int(live[m // 2]), int(live[-1]))
        pk = keys[pivot]
        pid = ids[pivot]
        lk = keys[live]
        li = ids[live]
        below = (lk < pk) | ((lk == pk) & (li < pid))
        n_below = int(np.count_nonzero(below))
        if k < n_below:
            live = live[below]
        elif k == n_below:
            return pivot
        else:
            above = (lk > pk) | ((lk == pk) & (li > pid))
            live = live[above]
            k -= n_below + 1


def median_split_mask(keys: np.ndarray, ids: np.ndarray) -> tuple[np.ndarray, int]:
    """Mask of the lower ceil(n/2) items and the position of the median.

    The median is the last item of the lower half, so a cut through it
    keeps it on the LowerOrEqual side.
    """
    n = len(keys)
    if n < 2:
        raise ValueError(f"Median split needs at least 2 items, got {n}")
    median = kth_smallest_index(keys, ids, (n + 1) // 2 - 1)
    mk = keys[median]
    mid = ids[median]
    mask = (keys < mk) | ((keys == mk) & (ids <= mid))
    return mask, median


def _as_arrays(items: Sequence[KeyedItem]) -> tuple[np.ndarray, np.ndarray]:
    keys = np.fromiter((float(item.key) for item in items), dtype=float, count=len(items))
    ids = np.fromiter((int(item.id) for item in items), dtype=np.int64, count=len(items))
    if len(np.unique(ids)) != len(ids):
        raise ValueError("KeyedItem ids must be unique within one selection")
    return keys, ids


def kth_smallest(items: Sequence[KeyedItem], k: int) -> KeyedItem:
    if len(items) == 0:
        raise ValueError("Cannot select from an empty sequence")
    keys, ids = _as_arrays(items)
    pos = kth_smallest_index(keys, ids, k)
    return KeyedItem(float(keys[pos]), int(ids[pos]))


def split_at_median(items: Sequence[KeyedItem]) -> tuple[frozenset[int], frozenset[int]]:
    """Split into the lower ceil(N/2) ids and the upper floor(N/2) ids."""
    if len(items) < 2:
        raise ValueError(f"Median split needs at least 2 items, got {len(items)}")
    keys, ids = _as_arrays(items)
    mask, _ = median_split_mask(keys, ids)
    return frozenset(int(i) for i in ids[mask]), frozenset(int(i) for i in ids[~mask])
