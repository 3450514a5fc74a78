"""Alphabets, patterns, SFT presentations and the combinators on them.

Letters are dense integer ids; display names live on the :class:`Alphabet`.
Coordinates are integer tuples, ``(x, y)`` in dimension two with ``y``
pointing up (the growth direction of approximation strips).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

Coord = tuple[int, ...]

# Largest alphabet the recoding operations will build.
MAX_ALPHABET_SIZE = 1 << 20


@dataclass(frozen=True)
class Alphabet:
    letters: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "letters", tuple(self.letters))
        if not self.letters:
            raise ValueError("alphabet must have at least one letter")
        if len(set(self.letters)) != len(self.letters):
            raise ValueError("alphabet letter names must be unique")

    @property
    def size(self) -> int:
        return len(self.letters)

    def index(self, name: str) -> int:
        try:
            return self.letters.index(name)
        except ValueError:
            raise KeyError(f"unknown letter {name!r}") from None

    def name(self, letter: int) -> str:
        return self.letters[letter]

    def render(self, word: Sequence[int]) -> str:
        """Join letter names; a space separator is used once any name is longer than one char."""
        names = [self.letters[c] for c in word]
        sep = "" if all(len(self.letters[c]) == 1 for c in range(self.size)) else " "
        return sep.join(names)

    def parse(self, text: str) -> tuple[int, ...]:
        if any(len(c) != 1 for c in self.letters):
            return tuple(self.index(tok) for tok in text.split())
        return tuple(self.index(ch) for ch in text)


@dataclass(frozen=True)
class Pattern:
    """A finite pattern: cells ``(coord, letter)`` sorted by coordinate."""

    cells: tuple[tuple[Coord, int], ...]

    def __post_init__(self) -> None:
        cells = tuple(sorted((tuple(c), int(a)) for c, a in self.cells))
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_mapping(cls, mapping: Mapping[Coord, int]) -> "Pattern":
        return cls(tuple(mapping.items()))

    @property
    def support(self) -> frozenset[Coord]:
        return frozenset(c for c, _ in self.cells)

    @property
    def letters(self) -> dict[Coord, int]:
        return dict(self.cells)

    @property
    def dimension(self) -> int:
        return len(self.cells[0][0]) if self.cells else 0

    def translate(self, offset: Coord) -> "Pattern":
        return Pattern(tuple((tuple(a + b for a, b in zip(c, offset)), x) for c, x in self.cells))

    def normalized(self) -> "Pattern":
        """Translate so that the minimum of every coordinate is zero."""
        if not self.cells:
            return self
        lows = [min(c[i] for c, _ in self.cells) for i in range(self.dimension)]
        return self.translate(tuple(-v for v in lows))

    def extent(self, axis: int) -> int:
        """Number of lattice steps spanned along ``axis`` (max minus min)."""
        vals = [c[axis] for c, _ in self.cells]
        return max(vals) - min(vals)


@dataclass(frozen=True)
class SftDef:
    dimension: int
    alphabet: Alphabet
    forbidden: tuple[Pattern, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "forbidden", tuple(self.forbidden))


@dataclass(frozen=True)
class FactorMap:
    """Sliding block code ``source -> target``.

    ``rule`` maps the tuple of source letters read on ``neighborhood`` (in
    that order) to a target letter. A letter-to-letter map has the single
    origin as neighborhood.
    """

    source: Alphabet
    target: Alphabet
    neighborhood: tuple[Coord, ...]
    rule: Mapping[tuple[int, ...], int] = field(hash=False, compare=True)

    @property
    def letter_to_letter(self) -> bool:
        return len(self.neighborhood) == 1 and not any(self.neighborhood[0])

    @classmethod
    def from_table(cls, source: Alphabet, target: Alphabet, table: Sequence[int], d: int = 2) -> "FactorMap":
        if len(table) != source.size:
            raise ValueError("letter table must cover the source alphabet")
        return cls(source, target, ((0,) * d,), {(a,): int(b) for a, b in enumerate(table)})

    @classmethod
    def from_names(cls, source: Alphabet, target: Alphabet, mapping: Mapping[str, str], d: int = 2) -> "FactorMap":
        return cls.from_table(source, target, [target.index(mapping[s]) for s in source.letters], d)

    @classmethod
    def identity(cls, alphabet: Alphabet, d: int = 2) -> "FactorMap":
        return cls.from_table(alphabet, alphabet, list(range(alphabet.size)), d)

    @property
    def table(self) -> tuple[int, ...]:
        if not self.letter_to_letter:
            raise ValueError("factor is not letter-to-letter; pre-compose higher_block_recode")
        return tuple(self.rule[(a,)] for a in range(self.source.size))

    def is_identity(self) -> bool:
        return (
            self.letter_to_letter
            and self.source == self.target
            and self.table == tuple(range(self.source.size))
        )

    def then(self, outer: "FactorMap") -> "FactorMap":
        """Letter-to-letter composition: apply ``self`` then ``outer``."""
        if outer.source != self.target:
            raise ValueError("factor composition: alphabets do not chain")
        inner, out = self.table, outer.table
        return FactorMap.from_table(self.source, outer.target, [out[b] for b in inner], len(self.neighborhood[0]))


@dataclass(frozen=True)
class Basis2D:
    u1: tuple[int, int]
    u2: tuple[int, int]

    @property
    def determinant(self) -> int:
        return self.u1[0] * self.u2[1] - self.u1[1] * self.u2[0]

    def apply(self, c: Coord) -> Coord:
        return (c[0] * self.u1[0] + c[1] * self.u2[0], c[0] * self.u1[1] + c[1] * self.u2[1])

    def inverse(self) -> "Basis2D":
        det = self.determinant
        if det not in (1, -1):
            raise ValueError("basis not unimodular")
        (a, c), (b, d) = self.u1, self.u2
        # inverse of [[a, b], [c, d]] is [[d, -b], [-c, a]] / det
        return Basis2D((d * det, -c * det), (-b * det, a * det))


IDENTITY_BASIS = Basis2D((1, 0), (0, 1))


class SftError(ValueError):
    """Raised for malformed inputs to the SFT combinators."""


# ---------------------------------------------------------------------------
# validation


def validate_sft(sft: SftDef) -> list[str]:
    """Return one diagnostic per violated invariant; empty means valid."""
    out: list[str] = []
    if sft.dimension < 1:
        out.append(f"dimension must be >= 1, got {sft.dimension}")
    for i, p in enumerate(sft.forbidden):
        if not p.cells:
            out.append(f"pattern {i}: empty support")
            continue
        coords = [c for c, _ in p.cells]
        if len(set(coords)) != len(coords):
            out.append(f"pattern {i}: duplicate coordinate")
        if any(len(c) != sft.dimension for c in coords):
            out.append(f"pattern {i}: dimension mismatch")
        for c, a in p.cells:
            if not 0 <= a < sft.alphabet.size:
                out.append(f"pattern {i}: letter out of range ({a} at {c})")
    return out


def require_valid(sft: SftDef) -> SftDef:
    problems = validate_sft(sft)
    if problems:
        raise SftError("; ".join(problems))
    return sft


def _require_2d(sft: SftDef) -> None:
    if sft.dimension != 2:
        raise SftError("operation implemented for dimension 2 only")


def dedupe_patterns(patterns: Iterable[Pattern]) -> tuple[Pattern, ...]:
    """Drop translation duplicates, keeping first-seen order."""
    seen: set[Pattern] = set()
    out = []
    for p in patterns:
        key = p.normalized()
        if key not in seen:
            seen.add(key)
            out.append(p)
    return tuple(out)


# ---------------------------------------------------------------------------
# vertical block recoding


def column_alphabet(alphabet: Alphabet, height: int) -> Alphabet:
    """Alphabet of vertical words of ``height`` letters, bottom letter first."""
    size = alphabet.size**height
    if size > MAX_ALPHABET_SIZE:
        raise SftError(f"alphabet overflow: {size} letters")
    names = ["(" + ",".join(alphabet.letters[a] for a in col) + ")"
             for col in itertools.product(range(alphabet.size), repeat=height)]
    return Alphabet(tuple(names))


def _column_id(col: Sequence[int], base: int) -> int:
    v = 0
    for a in col:
        v = v * base + a
    return v


def _fill_columns(fixed: Mapping[int, int], height: int, base: int) -> list[int]:
    """All column ids of ``height`` letters with the given entries pinned."""
    choices = [[fixed[i]] if i in fixed else range(base) for i in range(height)]
    return [_column_id(col, base) for col in itertools.product(*choices)]


def higher_block_recode(sft: SftDef, r: int) -> tuple[SftDef, FactorMap]:
    """Recode each cell as its vertical column of ``2r+1`` letters.

    Every placement of an original pattern is lifted onto every choice of
    recoded cells whose columns cover it; vertically adjacent columns must
    agree on their overlap. A recoded strip of half-width ``n`` therefore
    sees the same constraints as an original strip of half-width ``n + r``.
    The returned factor reads the central letter of each column.
    """
    _require_2d(sft)
    require_valid(sft)
    if r < 0:
        raise SftError("recoding radius must be non-negative")
    h = 2 * r + 1
    base = sft.alphabet.size
    alpha = column_alphabet(sft.alphabet, h)
    lifted: list[Pattern] = []
    for p in sft.forbidden:
        cells = p.normalized().cells
        for shifts in itertools.product(range(-r, r + 1), repeat=len(cells)):
            pinned: dict[Coord, dict[int, int]] = {}
            for ((x, y), a), t in zip(cells, shifts):
                pinned.setdefault((x, y - t), {})[r + t] = a
            keys = sorted(pinned)
            options = [_fill_columns(pinned[k], h, base) for k in keys]
            for letters in itertools.product(*options):
                lifted.append(Pattern(tuple(zip(keys, letters))))
    for low in range(alpha.size):
        lo = _digits(low, base, h)
        for high in range(alpha.size):
            if lo[1:] != _digits(high, base, h)[:-1]:
                lifted.append(Pattern((((0, 0), low), ((0, 1), high))))
    decode = [_digits(c, base, h)[r] for c in range(alpha.size)]
    out = SftDef(2, alpha, dedupe_patterns(lifted))
    return out, FactorMap.from_table(alpha, sft.alphabet, decode)


def _digits(value: int, base: int, width: int) -> tuple[int, ...]:
    out = []
    for _ in range(width):
        value, d = divmod(value, base)
        out.append(d)
    return tuple(reversed(out))


# ---------------------------------------------------------------------------
# basis change


def change_basis(sft: SftDef, basis: Basis2D) -> SftDef:
    """Map every pattern cell ``c`` to ``c[0]*u1 + c[1]*u2``.

    Row 0 and the horizontal direction are preserved when ``u1 = e1``. To
    express a system in coordinates adapted to a basis, pass the inverse.
    """
    _require_2d(sft)
    if basis.determinant not in (1, -1):
        raise SftError("basis not unimodular")
    pats = tuple(Pattern(tuple((basis.apply(c), a) for c, a in p.cells)) for p in sft.forbidden)
    return SftDef(2, sft.alphabet, pats)


# ---------------------------------------------------------------------------
# speed scaling and lattice combinators


def scale_speed_up(sft: SftDef, factor: FactorMap, M: int) -> tuple[SftDef, FactorMap]:
    """Dilate rows by ``M``: row ``j`` of a pattern goes to row ``M*j + l``.

    Rows in one residue class mod ``M`` form an independent copy of the
    input system, so only every ``M``-th row of a strip constrains row 0.
    """
    _require_2d(sft)
    require_valid(sft)
    if M < 1:
        raise SftError("scale factor must be positive")
    if M == 1:
        return sft, factor
    pats = []
    for p in sft.forbidden:
        for l in range(M):
            pats.append(Pattern(tuple(((x, M * y + l), a) for (x, y), a in p.cells)))
    return SftDef(2, sft.alphabet, tuple(pats)), factor


def scale_speed_down(sft: SftDef, factor: FactorMap, M: int) -> tuple[SftDef, FactorMap]:
    """Group ``M`` consecutive rows into one row over ``M``-tuples.

    Letter ``(c_0, ..., c_{M-1})`` at ``(x, j)`` stands for the original
    letters at ``(x, M*j + i)``. The factor reads component 0.
    """
    _require_2d(sft)
    require_valid(sft)
    if M < 1:
        raise SftError("scale factor must be positive")
    if M == 1:
        return sft, factor
    base = sft.alphabet.size
    alpha = column_alphabet(sft.alphabet, M)
    pats: list[Pattern] = []
    for p in sft.forbidden:
        cells = p.normalized().cells
        for l in range(M):
            pinned: dict[Coord, dict[int, int]] = {}
            for (x, y), a in cells:
                j, i = divmod(y + l, M)
                pinned.setdefault((x, j), {})[i] = a
            keys = sorted(pinned)
            options = [_fill_columns(pinned[k], M, base) for k in keys]
            for letters in itertools.product(*options):
                pats.append(Pattern(tuple(zip(keys, letters))))
    first = FactorMap.from_table(alpha, sft.alphabet, [_digits(c, base, M)[0] for c in range(alpha.size)])
    return SftDef(2, alpha, dedupe_patterns(pats)), first.then(factor)


def _check_targets(a: FactorMap, b: FactorMap) -> None:
    if a.target != b.target:
        raise SftError("factor targets incompatible")


def sup_combine(a: tuple[SftDef, FactorMap], b: tuple[SftDef, FactorMap]) -> tuple[SftDef, FactorMap]:
    """Interleave two realizations on alternating rows.

    Letters are tagged by system. Each row carries a single system, the
    systems alternate vertically, and each input's patterns are dilated by
    two so they act on every other row. Row 0 may carry either system, and
    it only sees its own system on rows of equal parity.
    """
    (sa, fa), (sb, fb) = a, b
    _require_2d(sa)
    _require_2d(sb)
    _check_targets(fa, fb)
    na = sa.alphabet.size
    alpha = Alphabet(tuple(f"{s}|0" for s in sa.alphabet.letters) + tuple(f"{s}|1" for s in sb.alphabet.letters))
    pats: list[Pattern] = []
    for p in sa.forbidden:
        pats.append(Pattern(tuple(((x, 2 * y), c) for (x, y), c in p.cells)))
    for p in sb.forbidden:
        pats.append(Pattern(tuple(((x, 2 * y), c + na) for (x, y), c in p.cells)))
    side_a, side_b = range(na), range(na, alpha.size)
    for u, v in itertools.product(side_a, side_b):
        pats.append(Pattern((((0, 0), u), ((1, 0), v))))
        pats.append(Pattern((((0, 0), v), ((1, 0), u))))
    for side in (side_a, side_b):
        for u, v in itertools.product(side, side):
            pats.append(Pattern((((0, 0), u), ((0, 1), v))))
    table = list(fa.table) + list(fb.table)
    return SftDef(2, alpha, tuple(pats)), FactorMap.from_table(alpha, fa.target, table)


def inf_combine(a: tuple[SftDef, FactorMap], b: tuple[SftDef, FactorMap]) -> tuple[SftDef, FactorMap]:
    """Fiber product of two realizations over equal projections.

    The alphabet is the full product; pairs with different images are
    forbidden as single cells. Each input pattern is lifted over the
    partner letters compatible with it. The factor reads the first
    component.
    """
    (sa, fa), (sb, fb) = a, b
    _require_2d(sa)
    _require_2d(sb)
    _check_targets(fa, fb)
    ta, tb = fa.table, fb.table
    nb = sb.alphabet.size
    alpha = Alphabet(tuple(f"{x}&{y}" for x in sa.alphabet.letters for y in sb.alphabet.letters))

    def pair(u: int, v: int) -> int:
        return u * nb + v

    partners_of_a = {u: [v for v in range(nb) if tb[v] == ta[u]] for u in range(sa.alphabet.size)}
    partners_of_b = {v: [u for u in range(sa.alphabet.size) if ta[u] == tb[v]] for v in range(nb)}
    pats: list[Pattern] = []
    for u in range(sa.alphabet.size):
        for v in range(nb):
            if ta[u] != tb[v]:
                pats.append(Pattern((((0, 0), pair(u, v)),)))
    for p in sa.forbidden:
        coords = [c for c, _ in p.cells]
        for partner in itertools.product(*(partners_of_a[x] for _, x in p.cells)):
            pats.append(Pattern(tuple((c, pair(x, v)) for c, (_, x), v in zip(coords, p.cells, partner))))
    for p in sb.forbidden:
        coords = [c for c, _ in p.cells]
        for partner in itertools.product(*(partners_of_b[y] for _, y in p.cells)):
            pats.append(Pattern(tuple((c, pair(u, y)) for c, (_, y), u in zip(coords, p.cells, partner))))
    table = [ta[u] for u in range(sa.alphabet.size) for _ in range(nb)]
    return SftDef(2, alpha, tuple(pats)), FactorMap.from_table(alpha, fa.target, table)


# ---------------------------------------------------------------------------
# JSON


def sft_to_dict(sft: SftDef, factor: FactorMap | None = None) -> dict:
    names = sft.alphabet.letters
    doc: dict = {
        "dimension": sft.dimension,
        "alphabet": list(names),
        "forbidden": [
            {"cells": [{"coord": list(c), "letter": names[a]} for c, a in p.cells]} for p in sft.forbidden
        ],
    }
    if factor is not None:
        tnames = factor.target.letters
        if factor.letter_to_letter:
            doc["factor"] = {
                "kind": "letter",
                "target": list(tnames),
                "map": {names[a]: tnames[b] for a, b in enumerate(factor.table)},
            }
        else:
            doc["factor"] = {
                "kind": "radius",
                "target": list(tnames),
                "map": {
                    "neighborhood": [list(c) for c in factor.neighborhood],
                    "rule": [[[names[a] for a in key], tnames[v]] for key, v in sorted(factor.rule.items())],
                },
            }
    return doc


def _field(doc: Mapping, key: str, where: str):
    if not isinstance(doc, Mapping) or key not in doc:
        raise SftError(f"missing field {where}{key}")
    return doc[key]


def sft_from_dict(doc: Mapping) -> tuple[SftDef, FactorMap]:
    """Parse the JSON document; a missing factor means the identity."""
    dim = _field(doc, "dimension", "")
    alpha = Alphabet(tuple(_field(doc, "alphabet", "")))
    pats = []
    for i, entry in enumerate(_field(doc, "forbidden", "")):
        cells = []
        for cell in _field(entry, "cells", f"forbidden[{i}]."):
            coord = tuple(_field(cell, "coord", f"forbidden[{i}].cells[]."))
            letter = _field(cell, "letter", f"forbidden[{i}].cells[].")
            cells.append((coord, alpha.index(letter)))
        pats.append(Pattern(tuple(cells)))
    sft = SftDef(dim, alpha, tuple(pats))
    fdoc = doc.get("factor")
    if fdoc is None:
        return sft, FactorMap.identity(alpha, dim)
    kind = _field(fdoc, "kind", "factor.")
    target = Alphabet(tuple(_field(fdoc, "target", "factor.")))
    mapping = _field(fdoc, "map", "factor.")
    if kind == "letter":
        return sft, FactorMap.from_names(alpha, target, mapping, dim)
    if kind == "radius":
        hood = tuple(tuple(c) for c in _field(mapping, "neighborhood", "factor.map."))
        rule = {tuple(alpha.index(a) for a in key): target.index(v) for key, v in _field(mapping, "rule", "factor.map.")}
        return sft, FactorMap(alpha, target, hood, rule)
    raise SftError(f"factor.kind must be 'letter' or 'radius', got {kind!r}")


def dumps_sft(sft: SftDef, factor: FactorMap | None = None) -> str:
    return json.dumps(sft_to_dict(sft, factor), sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def loads_sft(text: str) -> tuple[SftDef, FactorMap]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SftError(f"malformed JSON: {exc}") from None
    return sft_from_dict(doc)
