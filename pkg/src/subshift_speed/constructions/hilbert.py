"""Hilbert-curve substitution on 24 path tiles and the Hamiltonian path check.

A tile is a square crossed by one directed path. The path enters through a
side at one corner cell and leaves through a side at an adjacent corner cell;
the two corners share one edge of the square. In the unrotated frame the
corners are bottom-left (entry) and bottom-right (exit), and:

* ``line`` enters from the left and leaves to the right,
* ``bend_in`` enters from below and leaves to the right,
* ``bend_out`` enters from the left and leaves downwards.

Quarter-turn rotations and the left-right mirror give 24 tiles. A super-tile
of order ``n`` is a ``2^n x 2^n`` square whose path obeys the same contract.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

SHAPES = ("line", "bend_in", "bend_out")
SIDES = ("S", "E", "N", "W")  # counter-clockwise order
STEP = {"S": (0, -1), "E": (1, 0), "N": (0, 1), "W": (-1, 0)}
OPPOSITE = {"S": "N", "N": "S", "E": "W", "W": "E"}

# entry corner, entry side, exit corner, exit side of the unrotated shapes
_BASE = {
    "line": ((0, 0), "W", (1, 0), "E"),
    "bend_in": ((0, 0), "S", (1, 0), "E"),
    "bend_out": ((0, 0), "W", (1, 0), "S"),
}


def _rotate(corner: tuple[int, int], side: str) -> tuple[tuple[int, int], str]:
    x, y = corner
    return (1 - y, x), SIDES[(SIDES.index(side) + 1) % 4]


def _mirror(corner: tuple[int, int], side: str) -> tuple[tuple[int, int], str]:
    return (1 - corner[0], corner[1]), {"E": "W", "W": "E"}.get(side, side)


@dataclass(frozen=True)
class HilbertTile:
    shape: str
    rotation: int = 0  # quarter turns counter-clockwise
    mirrored: bool = False

    def __post_init__(self) -> None:
        if self.shape not in SHAPES or self.rotation not in range(4):
            raise ValueError(f"bad tile {self}")

    @property
    def geometry(self) -> tuple[tuple[int, int], str, tuple[int, int], str]:
        ein, sin, eout, sout = _BASE[self.shape]
        if self.mirrored:
            ein, sin = _mirror(ein, sin)
            eout, sout = _mirror(eout, sout)
        for _ in range(self.rotation):
            ein, sin = _rotate(ein, sin)
            eout, sout = _rotate(eout, sout)
        return ein, sin, eout, sout

    @property
    def name(self) -> str:
        return f"{self.shape}{self.rotation * 90}{'m' if self.mirrored else ''}"


TILES = tuple(HilbertTile(s, r, m) for s in SHAPES for m in (False, True) for r in range(4))
TILE_INDEX = {t: i for i, t in enumerate(TILES)}


def _quadrant_orders(start: tuple[int, int], end: tuple[int, int]):
    cells = [(0, 0), (1, 0), (0, 1), (1, 1)]
    for perm in itertools.permutations(cells):
        if perm[0] != start or perm[-1] != end:
            continue
        if all(abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1 for a, b in zip(perm, perm[1:])):
            yield perm


def _direction(a: tuple[int, int], b: tuple[int, int]) -> str:
    d = (b[0] - a[0], b[1] - a[1])
    return next(s for s, v in STEP.items() if v == d)


def _links(out_corner, out_side, in_corner, in_side, side: str) -> bool:
    """Exit of one quadrant meets the entry of its neighbour across ``side`` at every scale."""
    if out_side != side or in_side != OPPOSITE[side]:
        return False
    axis = 0 if side in ("E", "W") else 1
    return out_corner[1 - axis] == in_corner[1 - axis] and out_corner[axis] != in_corner[axis]


@lru_cache(maxsize=None)
def substitution() -> dict[HilbertTile, tuple[tuple[tuple[int, int], HilbertTile], ...]]:
    """For each tile, its four children as ``(quadrant, tile)`` in path order.

    Children are found by search: the first order and tile choice (in ``TILES``
    order) whose corners chain across shared quadrant sides.
    """
    table = {}
    for parent in TILES:
        ein, sin, eout, sout = parent.geometry
        found = None
        for order in _quadrant_orders(ein, eout):
            sides = [_direction(a, b) for a, b in zip(order, order[1:])]
            found = _assign(order, sides, ein, sin, eout, sout)
            if found:
                break
        if not found:
            raise RuntimeError(f"no substitution for {parent.name}")
        table[parent] = tuple(zip(order, found))
    return table


def _assign(order, sides, ein, sin, eout, sout):
    def rec(i: int, prev) -> list[HilbertTile] | None:
        if i == 4:
            return []
        for t in TILES:
            ci, si, co, so = t.geometry
            if i == 0 and (ci != ein or si != sin):
                continue
            if i > 0 and not _links(prev[0], prev[1], ci, si, sides[i - 1]):
                continue
            if i == 3 and (co != eout or so != sout):
                continue
            if i < 3 and so != sides[i]:
                continue
            rest = rec(i + 1, (co, so))
            if rest is not None:
                return [t] + rest
        return None

    return rec(0, None)


def hilbert_substitution(n: int, tile: HilbertTile | None = None) -> np.ndarray:
    """Tile indices of the order-``n`` super-tile; ``arr[y, x]`` with y upwards."""
    if not 0 <= n <= 12:
        raise ValueError("order must lie in [0, 12]")
    tile = tile or HilbertTile("line")
    kids = np.zeros((len(TILES), 2, 2), dtype=np.int16)
    for parent, children in substitution().items():
        for (qx, qy), child in children:
            kids[TILE_INDEX[parent], qy, qx] = TILE_INDEX[child]
    arr = np.array([[TILE_INDEX[tile]]], dtype=np.int16)
    for _ in range(n):
        h, w = arr.shape
        out = np.empty((2 * h, 2 * w), dtype=np.int16)
        for qy in (0, 1):
            for qx in (0, 1):
                out[qy::2, qx::2] = kids[arr, qy, qx]
        arr = out
    return arr


@dataclass
class PathReport:
    n: int
    cells: int
    visited: int
    start: tuple[int, int]
    end: tuple[int, int]
    ok: bool
    problem: str = ""

    @property
    def endpoints_on_boundary(self) -> bool:
        size = 2**self.n
        return all(min(p) == 0 or max(p) == size - 1 for p in (self.start, self.end))

    def render(self) -> str:
        if self.ok:
            return f"path OK, {self.visited} cells"
        return f"path FAILED after {self.visited} of {self.cells} cells: {self.problem}"


def check_hilbert_path(n: int, tile: HilbertTile | None = None) -> PathReport:
    """Walk the arrows of the order-``n`` super-tile from its entry cell."""
    tile = tile or HilbertTile("line")
    arr = hilbert_substitution(n, tile)
    size = arr.shape[0]
    geo = [t.geometry for t in TILES]
    ein, sin = tile.geometry[0], tile.geometry[1]
    x, y = ein[0] * (size - 1), ein[1] * (size - 1)
    seen = np.zeros(arr.shape, dtype=bool)
    start = (x, y)
    came = sin
    visited = 0
    while True:
        t = geo[arr[y, x]]
        if seen[y, x]:
            return PathReport(n, size * size, visited, start, (x, y), False, f"cell {(x, y)} visited twice")
        if t[1] != came:
            return PathReport(n, size * size, visited, start, (x, y), False, f"cell {(x, y)} entered through the wrong side")
        seen[y, x] = True
        visited += 1
        dx, dy = STEP[t[3]]
        nx, ny = x + dx, y + dy
        if not (0 <= nx < size and 0 <= ny < size):
            break
        came = OPPOSITE[t[3]]
        x, y = nx, ny
    end = (x, y)
    ok = visited == size * size
    return PathReport(n, size * size, visited, start, end, ok, "" if ok else "path left the square early")
