"""Standalone zone layer: red/blue cells whose zones double across starred rows."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import Alphabet, Pattern, SftDef
from ..strip import StripBuilder, StripGraph, _trim_mask


@dataclass(frozen=True)
class GridLetter:
    color: str  # "red" | "blue"
    starred: bool = False

    def __post_init__(self) -> None:
        if self.color not in ("red", "blue"):
            raise ValueError(f"grid color must be red or blue, got {self.color!r}")

    @property
    def name(self) -> str:
        return self.color[0].upper() + ("*" if self.starred else "")

    @classmethod
    def parse(cls, name: str) -> "GridLetter":
        color = {"R": "red", "B": "blue"}.get(name[:1])
        if color is None or name[1:] not in ("", "*"):
            raise ValueError(f"unknown grid letter {name!r}")
        return cls(color, name.endswith("*"))


GRID_LETTERS = tuple(GridLetter(c, s) for c in ("red", "blue") for s in (False, True))
GRID = Alphabet(tuple(g.name for g in GRID_LETTERS))  # R, R*, B, B*

_DIFF = (("R", "B"), ("B", "R"), ("R*", "B*"), ("B*", "R*"))
_MONO = (("R", "R"), ("B", "B"), ("R*", "R*"), ("B*", "B*"))


def grid_rule_families() -> dict[str, list[dict[tuple[int, int], str]]]:
    """Forbidden grid patterns by family, as ``{(x, y): letter}`` with y upwards."""
    fam: dict[str, list[dict[tuple[int, int], str]]] = {f"F{i}": [] for i in range(1, 6)}
    # a star anywhere in a row stars the whole row
    for a in ("R", "B"):
        for b in ("R", "B"):
            fam["F1"].append({(0, 0): a + "*", (1, 0): b})
    for a in ("R", "B"):
        for b in ("R", "B"):
            fam["F1"].append({(0, 0): a, (1, 0): b + "*"})
    # colors change in a column only just above a starred row
    for bot, top in (("R", "B"), ("B", "R"), ("B", "R*"), ("R", "B*")):
        fam["F2"].append({(0, 0): bot, (0, 1): top})
    # above a star: monochromatic stays monochromatic
    for x in ("R", "B"):
        for t in _DIFF:
            fam["F3"].append({(0, 0): x + "*", (1, 0): x + "*", (0, 1): t[0], (1, 1): t[1]})
    # red|blue merges
    for t in _DIFF:
        fam["F4"].append({(0, 0): "R*", (1, 0): "B*", (0, 1): t[0], (1, 1): t[1]})
    # blue|red stays a boundary
    for t in _MONO:
        fam["F5"].append({(0, 0): "B*", (1, 0): "R*", (0, 1): t[0], (1, 1): t[1]})
    return fam


def grid_layer_sft() -> SftDef:
    pats = []
    for family in grid_rule_families().values():
        for cells in family:
            pats.append(Pattern(tuple((xy, GRID.index(a)) for xy, a in cells.items())))
    return SftDef(2, GRID, tuple(pats))


@dataclass
class DoublingReport:
    runs: int
    star_rows: tuple[int, ...]
    height: int
    vertices: int
    row_runs: dict[int, tuple[int, ...]] = field(default_factory=dict)  # row -> observed inner run lengths
    expected: dict[int, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.vertices > 0 and all(self.row_runs[y] == (self.expected[y],) for y in self.expected)

    @property
    def top_run(self) -> int:
        return self.expected[self.height - 1]

    def render(self) -> str:
        lines = [f"strip height {self.height}, star rows {list(self.star_rows)}, {self.vertices} seeded columns"]
        for y in sorted(self.expected, reverse=True):
            got = ",".join(map(str, self.row_runs[y])) or "-"
            mark = "ok" if self.row_runs[y] == (self.expected[y],) else "MISMATCH"
            lines.append(f"row {y}: runs {got} (expected {self.expected[y]}) {mark}")
        lines.append(f"doubling {'OK' if self.ok else 'FAILED'}, top run length {self.top_run}")
        return "\n".join(lines)


def _seeded(g: StripGraph, star_rows: set[int]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Columns with the chosen starred rows whose bottom row alternates colors."""
    cells = g.cells[:, :, 0].astype(np.int64)
    starred = np.isin(cells, [GRID.index("R*"), GRID.index("B*")])
    want = np.array([y in star_rows for y in range(g.height)])
    keep = (starred == want).all(axis=1)
    red = np.isin(cells, [GRID.index("R"), GRID.index("R*")])
    ok = keep[g.src] & keep[g.dst] & (red[g.src, 0] != red[g.dst, 0])
    src, dst = g.src[ok], g.dst[ok]
    alive = _trim_mask(src, dst, len(cells))
    return red, src[alive], dst[alive]


def _row_runs(red_row: np.ndarray, src: np.ndarray, dst: np.ndarray, length: int) -> set[int]:
    """Lengths of runs strictly inside row words of ``length`` letters along the graph."""
    succ: dict[int, list[int]] = {}
    for u, v in zip(src.tolist(), dst.tolist()):
        succ.setdefault(u, []).append(v)
    layer = {(v, (bool(red_row[v]),)) for v in succ}
    for _ in range(length - 1):
        layer = {(w, word + (bool(red_row[w]),)) for v, word in layer for w in succ.get(v, ())}
    runs: set[int] = set()
    for _, word in layer:
        cuts = [i for i in range(1, len(word)) if word[i] != word[i - 1]]
        runs.update(b - a for a, b in zip(cuts, cuts[1:]))
    return runs


def check_grid_doubling(strip_height: int, runs: int, max_vertices: int | None = None) -> DoublingReport:
    """Seed a strip with an alternating bottom row and ``runs`` starred rows.

    Starred rows sit at heights 1, 3, ..., 2*runs-1; every other row must show
    monochromatic runs of length 2^(number of starred rows below it).
    """
    if runs < 0:
        raise ValueError("runs must be non-negative")
    if strip_height % 2 == 0 or strip_height < 2 * runs + 1:
        raise ValueError(f"strip height must be odd and at least {2 * runs + 1}")
    star_rows = tuple(2 * j + 1 for j in range(runs))
    g = StripBuilder(grid_layer_sft(), max_vertices).graph(strip_height // 2)
    red, src, dst = _seeded(g, set(star_rows))
    used = len(np.union1d(src, dst))
    report = DoublingReport(runs, star_rows, strip_height, used)
    for y in range(strip_height):
        if y in star_rows:
            continue
        below = sum(1 for s in star_rows if s < y)
        target = 2**below
        report.expected[y] = target
        found = _row_runs(red[:, y], src, dst, 3 * target + 2) if used else set()
        report.row_runs[y] = tuple(sorted(found))
    return report
