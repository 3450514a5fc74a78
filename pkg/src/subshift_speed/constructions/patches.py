"""Finite rectangular patches of letters and the rule checker used on them."""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..core import Alphabet, Pattern, SftDef


@dataclass(frozen=True)
class Patch:
    """Rectangular array of letter ids; ``rows[0]`` is the bottom row."""

    alphabet: Alphabet
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(a) for a in r) for r in self.rows)
        if rows and len({len(r) for r in rows}) != 1:
            raise ValueError("patch rows must have equal length")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_cells(
        cls,
        alphabet: Alphabet,
        width: int,
        height: int,
        cells: Mapping[tuple[int, int], str],
        background: str = "$",
    ) -> "Patch":
        bg = alphabet.index(background)
        grid = [[bg] * width for _ in range(height)]
        for (x, y), name in cells.items():
            if 0 <= x < width and 0 <= y < height:
                grid[y][x] = alphabet.index(name)
        return cls(alphabet, tuple(tuple(r) for r in grid))

    @classmethod
    def from_text(cls, alphabet: Alphabet, text: str) -> "Patch":
        """Parse a grid written top row first, letter names separated by blanks."""
        lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
        rows = [tuple(alphabet.index(tok) for tok in ln) for ln in reversed(lines)]
        return cls(alphabet, tuple(rows))

    @property
    def width(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def height(self) -> int:
        return len(self.rows)

    def at(self, x: int, y: int) -> int:
        return self.rows[y][x]

    def name_at(self, x: int, y: int) -> str:
        return self.alphabet.name(self.rows[y][x])

    def row_word(self, y: int) -> str:
        return self.alphabet.render(self.rows[y])

    def to_text(self) -> str:
        w = max(len(n) for n in self.alphabet.letters)
        return "".join(" ".join(self.alphabet.name(a).rjust(w) for a in r) + "\n" for r in reversed(self.rows))

    def array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64).reshape(self.height, self.width)

    def with_cell(self, x: int, y: int, name: str) -> "Patch":
        rows = [list(r) for r in self.rows]
        rows[y][x] = self.alphabet.index(name)
        return Patch(self.alphabet, tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class Violation:
    x: int  # placement offset of the normalized pattern
    y: int
    pattern_index: int


def check_pattern_free(config: Patch | np.ndarray, sft: SftDef) -> list[Violation]:
    """Every placement of every forbidden pattern fully inside ``config``.

    Results are sorted by pattern index, then ``y``, then ``x``.
    """
    arr = config.array() if isinstance(config, Patch) else np.asarray(config, dtype=np.int64)
    if arr.ndim != 2:
        raise ValueError("configurations must be two-dimensional")
    h, w = arr.shape
    # shape -> {word -> first pattern index}
    groups: dict[tuple, dict[tuple, int]] = defaultdict(dict)
    for i, p in enumerate(sft.forbidden):
        q = p.normalized()
        shape = tuple(c for c, _ in q.cells)
        groups[shape].setdefault(tuple(a for _, a in q.cells), i)
    out: list[Violation] = []
    base = max(sft.alphabet.size, 2)
    for shape, words in groups.items():
        sw = max(c[0] for c in shape) + 1
        sh = max(c[1] for c in shape) + 1
        if sw > w or sh > h:
            continue
        key = np.zeros((h - sh + 1, w - sw + 1), dtype=object if base ** len(shape) >= 1 << 62 else np.int64)
        mult = 1
        for dx, dy in shape:
            key = key + arr[dy : dy + h - sh + 1, dx : dx + w - sw + 1] * mult
            mult *= base
        packed = {}
        for word, idx in words.items():
            k, m = 0, 1
            for a in word:
                k += a * m
                m *= base
            packed[k] = idx
        hits = np.isin(key, np.array(list(packed), dtype=key.dtype))
        for y, x in zip(*np.nonzero(hits)):
            out.append(Violation(int(x), int(y), packed[key[y, x]]))
    out.sort(key=lambda v: (v.pattern_index, v.y, v.x))
    return out


def occurring_patterns(config: Patch, shape: Sequence[tuple[int, int]]) -> set[tuple[int, ...]]:
    """Words read on ``shape`` at every placement fully inside ``config``."""
    sw = max(c[0] for c in shape) + 1
    sh = max(c[1] for c in shape) + 1
    found = set()
    for y in range(config.height - sh + 1):
        for x in range(config.width - sw + 1):
            found.add(tuple(config.rows[y + dy][x + dx] for dx, dy in shape))
    return found


def complement_rules(
    alphabet: Alphabet,
    shapes: Sequence[Sequence[tuple[int, int]]],
    configs: Iterable[Patch],
) -> tuple[Pattern, ...]:
    """Forbid every pattern on ``shapes`` that occurs in none of ``configs``."""
    configs = list(configs)
    out = []
    for shape in shapes:
        shape = tuple(sorted(shape))
        seen: set[tuple[int, ...]] = set()
        for c in configs:
            seen |= occurring_patterns(c, shape)
        for word in itertools.product(range(alphabet.size), repeat=len(shape)):
            if word not in seen:
                out.append(Pattern(tuple(zip(shape, word))))
    return tuple(out)
