from __future__ import annotations

import pytest

from subshift_speed.constructions.hilbert import (
    OPPOSITE,
    STEP,
    TILES,
    HilbertTile,
    check_hilbert_path,
    hilbert_substitution,
    substitution,
)


def classic_hilbert(n: int) -> list[tuple[int, int]]:
    """Index-to-cell map of the textbook Hilbert curve on a 2^n square."""
    side = 2**n
    out = []
    for d in range(side * side):
        x = y = 0
        t = d
        s = 1
        while s < side:
            rx = 1 & (t // 2)
            ry = 1 & (t ^ rx)
            if ry == 0:
                if rx == 1:
                    x, y = s - 1 - x, s - 1 - y
                x, y = y, x
            x += s * rx
            y += s * ry
            t //= 4
            s *= 2
        out.append((x, y))
    return out


def walk(n: int, tile: HilbertTile | None = None) -> list[tuple[int, int]]:
    arr = hilbert_substitution(n, tile)
    size = arr.shape[0]
    tile = tile or HilbertTile("line")
    x, y = (c * (size - 1) for c in tile.geometry[0])
    cells = []
    while 0 <= x < size and 0 <= y < size and len(cells) <= size * size:
        cells.append((x, y))
        dx, dy = STEP[TILES[arr[y, x]].geometry[3]]
        x, y = x + dx, y + dy
    return cells


def test_twenty_four_distinct_tiles():
    assert len(TILES) == 24
    assert len({t.geometry for t in TILES}) == 24
    assert len(substitution()) == 24


def test_first_substitution_of_the_straight_tile():
    kids = substitution()[HilbertTile("line")]
    assert [q for q, _ in kids] == [(0, 0), (0, 1), (1, 1), (1, 0)]
    assert [t.shape for _, t in kids] == ["bend_in", "bend_in", "bend_out", "bend_out"]
    arr = hilbert_substitution(1)
    assert [[TILES[i].name for i in row] for row in arr] == [
        ["bend_in270m", "bend_out90m"],
        ["bend_in0", "bend_out0"],
    ]


def test_children_link_exit_to_entry():
    for parent, kids in substitution().items():
        for (qa, a), (qb, b) in zip(kids, kids[1:]):
            side = a.geometry[3]
            assert (qa[0] + STEP[side][0], qa[1] + STEP[side][1]) == qb
            assert b.geometry[1] == OPPOSITE[side]
        assert kids[0][1].geometry[:2] == parent.geometry[:2]
        assert kids[-1][1].geometry[2:] == parent.geometry[2:]


@pytest.mark.parametrize("n", range(0, 11))
def test_hamiltonian_path(n):
    r = check_hilbert_path(n)
    assert r.ok and r.visited == 4**n
    assert r.render() == f"path OK, {4**n} cells"


@pytest.mark.parametrize("tile", TILES, ids=lambda t: t.name)
def test_every_start_tile(tile):
    r = check_hilbert_path(5, tile)
    assert r.ok and r.endpoints_on_boundary


@pytest.mark.parametrize("n", range(1, 7))
def test_endpoints(n):
    r = check_hilbert_path(n)
    assert r.start == (0, 0) and r.end == (2**n - 1, 0)


@pytest.mark.parametrize("n", range(1, 7))
def test_matches_the_classic_curve(n):
    assert walk(n) == classic_hilbert(n)


def test_consecutive_cells_are_adjacent():
    cells = walk(6)
    assert all(abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1 for a, b in zip(cells, cells[1:]))
    assert len(set(cells)) == len(cells) == 4**6


def test_order_limits():
    with pytest.raises(ValueError):
        hilbert_substitution(-1)
    with pytest.raises(ValueError):
        hilbert_substitution(13)
    with pytest.raises(ValueError):
        HilbertTile("uturn")


def test_broken_tiling_is_reported(monkeypatch):
    import subshift_speed.constructions.hilbert as h

    good = h.hilbert_substitution

    def broken(n, tile=None):
        arr = good(n, tile).copy()
        arr[0, 1] = arr[0, 0]
        return arr

    monkeypatch.setattr(h, "hilbert_substitution", broken)
    r = h.check_hilbert_path(2)
    assert not r.ok and "FAILED" in r.render()
