"""Hilbert curve encode/decode on a 2^order x 2^order grid.

Index 0 sits in the lower-left cell and the curve ends in the lower-right
cell. Points are binned onto the grid over a bounding box; points outside
the box are clamped to the nearest boundary cell.
"""
from __future__ import annotations

from typing import Tuple

import numpy as np

from lb_lab.models.geometry import Rect, Vec2

MAX_ORDER = 16

Cell = Tuple[int, int]


def _check_order(order: int) -> int:
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"Hilbert order must be in [1, {MAX_ORDER}], got {order}")
    return 1 << order


def _rotate(n: int, x: int, y: int, rx: int, ry: int) -> Cell:
    if ry == 0:
        if rx == 1:
            x, y = n - 1 - x, n - 1 - y
        x, y = y, x
    return x, y


def encode_cell(cell: Cell, order: int) -> int:
    n = _check_order(order)
    x, y = cell
    if not (0 <= x < n and 0 <= y < n):
        raise ValueError(f"Cell {cell} outside the {n}x{n} grid")
    d = 0
    s = n // 2
    while s > 0:
        rx = int((x & s) > 0)
        ry = int((y & s) > 0)
        d += s * s * ((3 * rx) ^ ry)
        x, y = _rotate(n, x, y, rx, ry)
        s //= 2
    return d


def decode_index(index: int, order: int) -> Cell:
    n = _check_order(order)
    if not 0 <= index < n * n:
        raise ValueError(f"Hilbert index {index} outside [0, {n * n})")
    t = index
    x = y = 0
    s = 1
    while s < n:
        rx = 1 & (t // 2)
        ry = 1 & (t ^ rx)
        x, y = _rotate(s, x, y, rx, ry)
        x += s * rx
        y += s * ry
        t //= 4
        s *= 2
    return x, y


def _bin(value, lo: float, extent: float, n: int):
    if extent <= 0.0:
        return np.zeros_like(np.asarray(value), dtype=np.int64)
    idx = np.floor((np.asarray(value, dtype=float) - lo) / extent * n).astype(np.int64)
    return np.clip(idx, 0, n - 1)


def cell_of(p: Vec2, bbox: Rect, order: int) -> Cell:
    n = _check_order(order)
    return int(_bin(p.x, bbox.min.x, bbox.width, n)), int(_bin(p.y, bbox.min.y, bbox.height, n))


def hilbert_index(p: Vec2, bbox: Rect, order: int) -> int:
    return encode_cell(cell_of(p, bbox, order), order)


def hilbert_index_many(points: np.ndarray, bbox: Rect, order: int) -> np.ndarray:
    """Vectorised `hilbert_index` over an (n, 2) array."""
    n = _check_order(order)
    x = _bin(points[:, 0], bbox.min.x, bbox.width, n)
    y = _bin(points[:, 1], bbox.min.y, bbox.height, n)
    d = np.zeros(len(points), dtype=np.int64)
    s = n // 2
    while s > 0:
        rx = ((x & s) > 0).astype(np.int64)
        ry = ((y & s) > 0).astype(np.int64)
        d += np.int64(s) * np.int64(s) * ((3 * rx) ^ ry)
        flip = (ry == 0) & (rx == 1)
        x = np.where(flip, n - 1 - x, x)
        y = np.where(flip, n - 1 - y, y)
        swap = ry == 0
        x, y = np.where(swap, y, x), np.where(swap, x, y)
        s //= 2
    return d
