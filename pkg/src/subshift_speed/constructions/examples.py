"""Worked tilesets: the block-triangle system, the binary counter and the mirror.

Each builder returns ``(sft, factor, oracle)``. The counter and mirror rule
tables are the complement of the patterns seen in a family of generated
configurations (see ``counter_configuration`` and ``mirror_configuration``):
a pattern on the chosen shapes is forbidden unless some generated
configuration contains it.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

from ..core import Alphabet, FactorMap, Pattern, SftDef, require_valid
from ..lang import BlockEqualOracle, PalindromeOracle
from .patches import Patch, complement_rules

AB = Alphabet(("a", "b", "$"))

# ---------------------------------------------------------------------------
# a^n b^n triangles


def example_21_patterns() -> tuple[Pattern, ...]:
    """The six families, instantiated over their free letters (14 patterns)."""
    a, b, d = AB.index("a"), AB.index("b"), AB.index("$")
    alpha, beta, gamma = (a, b), (d, b), (d, a)
    pats = []
    for x in beta:
        for y in alpha:
            pats.append({(0, 0): x, (1, 0): a, (1, 1): y})  # first a carries $ above
    for x in beta:
        pats.append({(0, 0): a, (1, 0): a, (1, 1): x})  # later a carries a above
    pats.append({(0, 0): a, (1, 0): d})
    for x in gamma:
        for y in alpha:
            pats.append({(0, 0): b, (1, 0): x, (0, 1): y})  # last b carries $ above
    for x in gamma:
        pats.append({(0, 0): b, (1, 0): b, (0, 1): x})  # earlier b carries b above
    pats.append({(0, 0): d, (1, 0): b})
    return tuple(Pattern.from_mapping(p) for p in pats)


def build_example_21():
    sft = require_valid(SftDef(2, AB, example_21_patterns()))
    return sft, FactorMap.identity(AB), BlockEqualOracle(AB)


def triangle_configuration(row: str, height: int | None = None, pad: int = 1) -> Patch:
    """Stack of shrinking rows above ``row``: each block ``a^p b^m`` loses one letter per side."""
    w = len(row)
    height = height if height is not None else w // 2 + 2 + pad
    cells = {}
    cur = list(row)
    y = pad
    while y < height and any(c != "$" for c in cur):
        for x, c in enumerate(cur):
            if c != "$":
                cells[(x, y)] = c
        nxt = ["$"] * w
        for x in range(w):
            if cur[x] == "a" and x > 0 and cur[x - 1] == "a":
                nxt[x] = "a"
            if cur[x] == "b" and x + 1 < w and cur[x + 1] == "b":
                nxt[x] = "b"
        cur = nxt
        y += 1
    return Patch.from_cells(AB, w, height, cells)


def _cells(spec: str, name: str) -> dict:
    out = {}
    for tok in spec.split():
        x, y = tok.split("/")
        out[(int(x), int(y))] = name
    return out


def four_triangles_patch() -> Patch:
    """23 x 13 window of a configuration with four triangles."""
    a = _cells(
        "1/1 2/1 3/1 2/2 3/2 3/3 4/6 5/6 6/6 7/6 8/6 5/7 6/7 7/7 8/7 6/8 7/8 8/8 7/9 8/9 8/10 "
        "16/4 17/4 18/4 19/4 17/5 18/5 19/5 18/6 19/6 19/7 8/2 9/2 10/2 9/3 10/3 10/4 "
        "15/9 16/9 17/9 16/10 17/10 17/11",
        "a",
    )
    b = _cells(
        "4/1 5/1 6/1 4/2 5/2 4/3 9/6 10/6 11/6 12/6 13/6 9/7 10/7 11/7 12/7 9/8 10/8 11/8 9/9 10/9 9/10 "
        "20/4 21/4 22/4 20/5 21/5 22/5 20/6 21/6 20/7 11/2 12/2 13/2 11/3 12/3 11/4 "
        "18/9 19/9 20/9 18/10 19/10 18/11",
        "b",
    )
    return Patch.from_cells(AB, 23, 13, {**a, **b})


def mismatched_strip_patch() -> Patch:
    """Seven-row strip around a mismatched central block."""
    a = _cells(
        "3/3 2/6 3/6 4/6 5/6 6/6 7/6 8/6 3/7 4/7 5/7 6/7 7/7 8/7 4/8 5/8 6/8 7/8 8/8 5/9 6/9 7/9 8/9 "
        "16/4 17/4 18/4 19/4 17/5 18/5 19/5 18/6 19/6 19/7 9/3 10/3 10/4 15/9 16/9 17/9",
        "a",
    )
    b = _cells(
        "4/3 9/6 10/6 11/6 12/6 13/6 9/7 10/7 11/7 12/7 9/8 10/8 11/8 9/9 10/9 "
        "20/4 21/4 22/4 20/5 21/5 22/5 20/6 21/6 20/7 11/3 12/3 11/4 18/9 19/9 20/9",
        "b",
    )
    shifted = {(x, y - 3): v for (x, y), v in {**a, **b}.items()}
    return Patch.from_cells(AB, 23, 7, shifted)


# ---------------------------------------------------------------------------
# binary counter

COUNTER = Alphabet(("a", "b", "$", "0_a", "1_a", "c_a", "0_b", "1_b", "c_b"))
SQUARE = ((0, 0), (0, 1), (1, 0), (1, 1))


def counter_configuration(row: str, pad: int = 1, top: int = 2) -> Patch:
    """Counters above every block of ``row`` (a word over a, b, $).

    Level ``h`` above an a-run holds bit ``h`` of the number of a's seen so
    far; the carry out of level ``h`` at column ``x`` reaches level ``h+1``
    at column ``x+1``. ``c`` marks a bit that just dropped to 0 and passes a
    carry on; ``$`` above a column means the level has not started yet.
    b-runs count from their right end. The two counters meet at the
    boundary between the a-run and the b-run, where they must agree.
    """
    w = len(row)
    levels = max(1, w.bit_length()) + 2
    grid: dict[tuple[int, int], str] = {}

    def count(side: str, xs: Sequence[int], step: int) -> None:
        for h in range(1, levels + 1):
            for x in xs:
                if row[x] != side:
                    continue
                prev_x = x - step
                inside = 0 <= prev_x < w and row[prev_x] == side
                prev = grid.get((prev_x, h), "$") if inside else "$"
                below = (row[prev_x] if h == 1 else grid.get((prev_x, h - 1), "$")) if inside else "$"
                carry = below in (side, f"c_{side}")
                if carry:
                    grid[(x, h)] = f"c_{side}" if prev == f"1_{side}" else f"1_{side}"
                elif prev == f"1_{side}":
                    grid[(x, h)] = f"1_{side}"
                elif prev in (f"0_{side}", f"c_{side}"):
                    grid[(x, h)] = f"0_{side}"

    count("a", range(w), 1)
    count("b", range(w - 1, -1, -1), -1)
    height = max([h for _, h in grid] + [0]) + 1 + pad + top
    cells = {(x, y + pad): v for (x, y), v in grid.items()}
    for x, c in enumerate(row):
        if c != "$":
            cells[(x, pad)] = c
    return Patch.from_cells(COUNTER, w, height, cells)


def counter_family(max_block: int = 64, max_pair: int = 7) -> list[Patch]:
    rows = ["$$" + "a" * p + "b" * p + "$$" for p in range(1, max_block + 1)]
    for p in range(1, max_pair + 1):
        for q in range(1, max_pair + 1):
            for sep in ("", "$"):
                rows.append("$$" + "a" * p + "b" * p + sep + "a" * q + "b" * q + "$$")
    return [counter_configuration(r) for r in rows]


@lru_cache(maxsize=None)
def counter_patterns(max_block: int = 64) -> tuple[Pattern, ...]:
    return complement_rules(COUNTER, [SQUARE], counter_family(max_block))


def build_counter_tileset():
    """Counter tileset over nine letters; counter cells project to ``$``."""
    sft = require_valid(SftDef(2, COUNTER, counter_patterns()))
    mapping = {"a": "a", "b": "b", "$": "$"}
    mapping.update({n: "$" for n in COUNTER.letters[3:]})
    return sft, FactorMap.from_names(COUNTER, AB, mapping), BlockEqualOracle(AB)


def counter_patch() -> Patch:
    """a^12 b^12 with both counters (28 x 9 window)."""
    cells = {(x, 2): "a" for x in range(2, 14)}
    cells.update({(x, 2): "b" for x in range(14, 26)})
    cells.update(_cells("8/4 12/4 13/5", "0_a"))
    cells.update(_cells("19/4 15/4 14/5", "0_b"))
    cells.update(_cells("4/3 6/3 7/4 8/3 10/3 11/4 12/3 12/5", "c_a"))
    cells.update(_cells("23/3 21/3 20/4 19/3 17/3 16/4 15/3 15/5", "c_b"))
    cells.update(
        _cells("3/3 5/3 5/4 6/4 7/3 8/5 9/3 9/4 9/5 10/4 10/5 11/3 11/5 13/3 13/4 13/6", "1_a")
    )
    cells.update(
        _cells("24/3 22/3 22/4 21/4 20/3 19/5 18/3 18/4 18/5 17/4 17/5 16/3 16/5 14/3 14/4 14/6", "1_b")
    )
    return Patch.from_cells(COUNTER, 28, 9, cells)


# ---------------------------------------------------------------------------
# mirror (even palindromes)

MIRROR = Alphabet(("$", "0_l", "1_l", "0_r", "1_r"))
BITS = Alphabet(("0", "1", "$"))
MIRROR_SHAPES = (((0, 0), (1, 0), (1, 1)), ((0, 0), (0, 1), (1, 0)))


def mirror_configuration(segments: Sequence[Sequence[int]], gap: int = 1, pad: int = 1) -> Patch:
    """Row ``$ u1 rev(u1) $ u2 rev(u2) ...``; left letters drift up-right, right letters up-left."""
    cells: dict[tuple[int, int], str] = {}
    x = gap
    for u in segments:
        n = len(u)
        for h in range(n):
            for i in range(n - h):
                cells[(x + h + i, pad + h)] = f"{u[i]}_l"
                cells[(x + 2 * n - 1 - h - i, pad + h)] = f"{u[i]}_r"
        x += 2 * n + gap
    width = x
    height = pad + max([len(u) for u in segments] + [0]) + 2
    return Patch.from_cells(MIRROR, width, height, cells)


def mirror_family(max_len: int = 6, max_pair: int = 3) -> list[Patch]:
    import itertools

    def words(m: int):
        return [u for n in range(m + 1) for u in itertools.product((0, 1), repeat=n)]

    out = [mirror_configuration([u]) for u in words(max_len)]
    small = words(max_pair)
    out += [mirror_configuration([u, v]) for u in small for v in small]
    return out


@lru_cache(maxsize=None)
def mirror_patterns() -> tuple[Pattern, ...]:
    return complement_rules(MIRROR, MIRROR_SHAPES, mirror_family())


def build_palindrome_tileset():
    sft = require_valid(SftDef(2, MIRROR, mirror_patterns()))
    mapping = {"$": "$", "0_l": "0", "1_l": "1", "0_r": "0", "1_r": "1"}
    return sft, FactorMap.from_names(MIRROR, BITS, mapping), PalindromeOracle(BITS)


def mirror_patch() -> Patch:
    """Segment 00101101 mirrored, 18 x 12 window."""
    cells = _cells(
        "1/2 2/2 4/2 7/2 2/3 3/3 5/3 8/3 3/4 4/4 6/4 4/5 5/5 7/5 5/6 6/6 8/6 6/7 7/7 7/8 8/8 8/9", "0_l"
    )
    cells.update(_cells("3/2 5/2 6/2 8/2 4/3 6/3 7/3 5/4 7/4 8/4 6/5 8/5 7/6 8/7", "1_l"))
    cells.update(
        _cells(
            "16/2 15/2 13/2 10/2 15/3 14/3 12/3 9/3 14/4 13/4 11/4 13/5 12/5 10/5 12/6 11/6 9/6 "
            "10/7 11/7 9/8 10/8 9/9",
            "0_r",
        )
    )
    cells.update(_cells("14/2 12/2 11/2 9/2 13/3 11/3 10/3 12/4 10/4 9/4 11/5 9/5 10/6 9/7", "1_r"))
    return Patch.from_cells(MIRROR, 18, 12, cells)
