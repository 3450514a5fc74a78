"""Five-layer tileset that runs an enumerating machine above a marked row.

Layers, bottom to top of the product letter:

* ``Line``: ``l`` marks the simulated row; cells above carry ``u:a`` and
  cells below ``d:a``, where each unmarked row spells a shift of the periodic
  word ``w`` repeated forever;
* ``Config``: a letter of the target alphabet, constant along anti-diagonals,
  so row ``y+1`` is row ``y`` shifted one cell left;
* ``Grid``: the red/blue zone layer of :mod:`.grid`;
* ``Machine``: a tape letter, or ``state:letter`` where the head sits;
* ``Compar``: ``G`` (green) or ``.``; green spreads right from a ``$`` along
  tape letters equal to the Config letter and may not reach the next ``$``.

Rule checks are predicates over small windows of named layer slots; the
product alphabet is too large to list patterns letter by letter.

Machine windows are checked column by column. The cell above the centre of a
3x2 window must be the centre after one step: the written letter, with the
head if it stayed or arrived from a neighbour. Heads on ``R*`` cells vanish
and the cell above an ``R*`` cell is blank. Machine windows only apply from
the marked row upwards.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from ..core import Alphabet, FactorMap, SftError
from ..strip import BudgetExceeded
from ..tm import BLANK, SEP, TmSpec
from .grid import GRID, grid_rule_families

LAYERS = ("Line", "Config", "Grid", "Machine", "Compar")
DEFAULT_MAX_LETTERS = 100_000
GREEN, PLAIN = "G", "."
MARK = "l"

Slot = tuple[int, int, str]  # dx, dy, layer


# ---------------------------------------------------------------------------
# alphabets


@dataclass(frozen=True)
class LayeredAlphabet:
    names: tuple[str, ...]
    layers: tuple[Alphabet, ...]

    def __post_init__(self) -> None:
        if len(self.names) != len(self.layers):
            raise ValueError("one alphabet per layer")

    @property
    def size(self) -> int:
        return math.prod(a.size for a in self.layers)

    def layer(self, name: str) -> Alphabet:
        return self.layers[self.names.index(name)]

    def index(self, letter: Sequence[str]) -> int:
        """Mixed-radix index with the first layer most significant."""
        i = 0
        for a, part in zip(self.layers, letter):
            i = i * a.size + a.index(part)
        return i

    def letter(self, index: int) -> tuple[str, ...]:
        if not 0 <= index < self.size:
            raise IndexError(index)
        parts = []
        for a in reversed(self.layers):
            index, r = divmod(index, a.size)
            parts.append(a.name(r))
        return tuple(reversed(parts))

    def project(self, letter: Sequence[str], layer: str) -> str:
        return letter[self.names.index(layer)]

    def flat(self) -> Alphabet:
        return Alphabet(tuple("|".join(self.letter(i)) for i in range(self.size)))


def head_of(letter: str) -> tuple[str, str] | None:
    """``(state, symbol)`` if a head sits on this machine letter."""
    if ":" in letter:
        q, s = letter.rsplit(":", 1)
        return q, s
    return None


def symbol_of(letter: str) -> str:
    return letter.rsplit(":", 1)[-1]


def positive(symbol: str) -> str:
    """Letter of the non-negative half of a folded tape cell (identity otherwise)."""
    return symbol.lstrip("^").split("/", 1)[0]


# ---------------------------------------------------------------------------
# one-sided tapes


FOLD_START = "fold-start"


def _fold_name(a: str, b: str, marked: bool) -> str:
    if (a, b) == (BLANK, BLANK) and not marked:
        return BLANK
    return ("^" if marked else "") + f"{a}/{b}"


def _unfold(name: str) -> tuple[str, str, bool] | None:
    if name == BLANK:
        return BLANK, BLANK, False
    marked = name.startswith("^")
    body = name.lstrip("^")
    if "/" not in body:
        return None
    a, b = body.split("/", 1)
    return a, b, marked


def fold_tapes(m: TmSpec) -> TmSpec:
    """Simulate ``m`` on tapes that never go left of their first cell.

    Cell ``i`` stores positions ``i`` and ``-i-1``; a sign per tape in the
    state says which half the head reads. The first step marks cell 0 so the
    machine knows where to turn around.
    """
    gamma = m.alphabet
    pairs = [(a, b) for a in gamma for b in gamma]
    letters = [BLANK, SEP] + [_fold_name(a, b, False) for a, b in pairs if (a, b) != (BLANK, BLANK)]
    letters += [_fold_name(a, b, True) for a, b in pairs]
    for q in m.states:
        if q.endswith(("+", "-")) or ":" in q:
            raise SftError(f"cannot fold: state name {q!r} clashes with the sign suffix")
    k = m.tapes
    signs = list(itertools.product("+-", repeat=k))
    states = [FOLD_START] + [q + "".join(s) for q in m.states for s in signs]
    delta = {}
    for reads in itertools.product(letters, repeat=k):
        dec = [_unfold(r) for r in reads]
        if any(d is None for d in dec):
            continue
        writes = tuple(_fold_name(a, b, True) for a, b, _ in dec)
        delta[(FOLD_START, reads)] = (m.start + "+" * k, writes, ("S",) * k)
    for q in m.states:
        if q in m.final:
            continue
        for sg in signs:
            for reads in itertools.product(letters, repeat=k):
                dec = [_unfold(r) for r in reads]
                if any(d is None for d in dec):
                    continue
                cur = tuple(a if s == "+" else b for (a, b, _), s in zip(dec, sg))
                q2, w, mv = m.delta[(q, cur)]
                new_w, new_mv, new_sg = [], [], []
                for (a, b, mk), s, x, d in zip(dec, sg, w, mv):
                    new_w.append(_fold_name(x, b, mk) if s == "+" else _fold_name(a, x, mk))
                    if s == "+":
                        if d == "L" and mk:
                            new_mv.append("S")
                            new_sg.append("-")
                        else:
                            new_mv.append(d)
                            new_sg.append("+")
                    else:
                        if d == "R" and mk:
                            new_mv.append("S")
                            new_sg.append("+")
                        else:
                            new_mv.append({"L": "R", "R": "L", "S": "S"}[d])
                            new_sg.append("-")
                delta[(q + "".join(sg), reads)] = (q2 + "".join(new_sg), tuple(new_w), tuple(new_mv))
    # the unused separator alias halts in place
    final = {q + "".join(s) for q in m.final for s in signs}
    for q in states:
        if q in final:
            continue
        for reads in itertools.product(letters, repeat=k):
            delta.setdefault((q, reads), (q, reads, ("S",) * k))
    emit = {q + "".join(s) for q in m.emit for s in signs}
    return TmSpec(k, tuple(states), FOLD_START, tuple(letters), delta, frozenset(final), frozenset(emit),
                  f"{m.name}-folded")


def unfold_config(c, tapes: int) -> tuple[str, list[dict[int, str]], list[int]]:
    """State, two-way tape contents and head positions of a folded machine configuration."""
    state = c.state
    signs = "+" * tapes
    if state != FOLD_START:
        state, signs = state[:-tapes], state[-tapes:]
    contents, heads = [], []
    for t in range(tapes):
        cells: dict[int, str] = {}
        for i, name in c.tapes[t].items():
            a, b, _ = _unfold(name)
            if a != BLANK:
                cells[i] = a
            if b != BLANK:
                cells[-i - 1] = b
        contents.append(cells)
        h = c.heads[t]
        heads.append(h if signs[t] == "+" else -h - 1)
    return state, contents, heads


# ---------------------------------------------------------------------------
# rule families


@dataclass(frozen=True)
class RuleFamily:
    name: str
    slots: tuple[Slot, ...]
    forbidden: Callable[[tuple[str, ...]], bool] = field(compare=False)
    size: int | None = None  # number of forbidden slot assignments

    @property
    def width(self) -> int:
        return max(s[0] for s in self.slots) + 1

    @property
    def height(self) -> int:
        return max(s[1] for s in self.slots) + 1


@dataclass(frozen=True)
class LayeredViolation:
    family: str
    x: int
    y: int


@dataclass
class LayeredConfig:
    """Finite product configuration; ``layers[name][y][x]`` with y upwards."""

    width: int
    height: int
    layers: dict[str, list[list[str]]]

    @classmethod
    def blank(cls, width: int, height: int, fill: Mapping[str, str]) -> "LayeredConfig":
        return cls(width, height, {n: [[fill[n]] * width for _ in range(height)] for n in LAYERS})

    def get(self, layer: str, x: int, y: int) -> str:
        return self.layers[layer][y][x]

    def set(self, layer: str, x: int, y: int, value: str) -> None:
        self.layers[layer][y][x] = value

    def letter(self, x: int, y: int) -> tuple[str, ...]:
        return tuple(self.layers[n][y][x] for n in LAYERS)

    def copy(self) -> "LayeredConfig":
        return LayeredConfig(self.width, self.height, {n: [list(r) for r in rows] for n, rows in self.layers.items()})

    def with_cell(self, layer: str, x: int, y: int, value: str) -> "LayeredConfig":
        c = self.copy()
        c.set(layer, x, y, value)
        return c

    def render(self, layer: str) -> str:
        rows = self.layers[layer]
        w = max(len(v) for r in rows for v in r)
        return "".join(" ".join(v.rjust(w) for v in r) + "\n" for r in reversed(rows))

    def to_text(self) -> str:
        return "".join(f"[{n}]\n{self.render(n)}" for n in LAYERS)


class QuickRealization:
    """Layered rule set compiled from a single-tape enumerator and a periodic word."""

    def __init__(self, machine: TmSpec, w: str, target: Alphabet, source: TmSpec | None = None):
        self.machine = machine
        self.source = source or machine
        self.w = w
        self.target = target
        gamma = machine.alphabet
        self.tape_letters = tuple(gamma) + tuple(f"{q}:{g}" for q in machine.states for g in gamma)
        line = (MARK,) + tuple(f"u:{a}" for a in target.letters) + tuple(f"d:{a}" for a in target.letters)
        self.alphabet = LayeredAlphabet(
            LAYERS,
            (Alphabet(line), target, GRID, Alphabet(self.tape_letters), Alphabet((PLAIN, GREEN))),
        )
        self.families: dict[str, RuleFamily] = {}
        self._sizes: dict[str, int | None] = {}
        self._build()

    # -- machine step ---------------------------------------------------

    def _action(self, letter: str):
        h = head_of(letter)
        if h is None:
            return None
        q, s = h
        if q in self.machine.final:
            return q, s, "S"
        q2, writes, moves = self.machine.delta[(q, (s,))]
        return q2, writes[0], moves[0]

    def expected_top(self, bottom: Sequence[str], dead: Sequence[bool]) -> str | None:
        """Centre cell one step later, or ``None`` when two heads collide."""
        alpha, beta, gamma = bottom
        arrivals = []
        if dead[1]:
            sym = BLANK
        else:
            act = self._action(beta)
            if act is None:
                sym = symbol_of(beta)
            else:
                sym = act[1]
                if act[2] == "S":
                    arrivals.append(act[0])
        left = None if dead[0] else self._action(alpha)
        if left is not None and left[2] == "R":
            arrivals.append(left[0])
        right = None if dead[2] else self._action(gamma)
        if right is not None and right[2] == "L":
            arrivals.append(right[0])
        if len(arrivals) > 1:
            return None
        return f"{arrivals[0]}:{sym}" if arrivals else sym

    # -- families ---------------------------------------------------------

    def _add(self, name: str, slots: Sequence[Slot], pred, size=None) -> None:
        self.families[name] = RuleFamily(name, tuple(slots), pred, size)

    def family_size(self, name: str) -> int | None:
        """Forbidden slot assignments of a family (``None`` when too many to enumerate)."""
        if name not in self._sizes:
            f = self.families[name]
            if f.size is not None:
                self._sizes[name] = f.size
            elif name in ("Comput", "Erase"):
                self._sizes[name] = self._count_machine(name == "Erase")
            else:
                self._sizes[name] = self._count(f.slots, f.forbidden)
        return self._sizes[name]

    def _count(self, slots: Sequence[Slot], pred) -> int | None:
        domains = [self.alphabet.layer(s[2]).letters for s in slots]
        if math.prod(len(d) for d in domains) > 2_000_000:
            return None
        return sum(1 for v in itertools.product(*domains) if pred(v))

    def _build(self) -> None:
        A = self.target.letters
        w = self.w
        rotations = {w[i:] + w[:i] for i in range(len(w))}
        above = lambda s: s == MARK or s.startswith("u:")  # noqa: E731

        def stack(v):
            bot, top = v
            return (bot == MARK and (top == MARK or top.startswith("d:"))) or (bot.startswith("u:") and top == MARK)

        self._add("Line.stack", [(0, 0, "Line"), (0, 1, "Line")], stack)

        def rows(v):
            for pre in ("u:", "d:"):
                if all(s.startswith(pre) for s in v):
                    return "".join(s[2:] for s in v) not in rotations
            return False

        self._add("Line.rows", [(i, 0, "Line") for i in range(len(w))], rows)
        self._add("Config.diag", [(0, 1, "Config"), (1, 0, "Config")], lambda v: v[0] != v[1])

        for fam, pats in grid_rule_families().items():
            for j, cells in enumerate(pats):
                keys = sorted(cells)
                want = tuple(cells[c] for c in keys)
                self._add(f"Grid.{fam}.{j}", [(x, y, "Grid") for x, y in keys],
                          lambda v, want=want: tuple(v) == want, 1)

        self._add("SyncroLine", [(0, 0, "Line"), (0, 0, "Grid"), (1, 0, "Grid")],
                  lambda v: v[0] == MARK and v[1] == v[2])
        init = f"{self.machine.start}:{BLANK}"
        self._add("Init", [(0, 0, "Line"), (0, 0, "Machine")], lambda v: v[0] == MARK and v[1] != init)

        def star(v):
            line, g0, g1, cell = v
            if not above(line):
                return False
            act = self._action(cell)
            if act is None or act[2] != "R":
                return False
            return (g0[0] != g1[0]) != g0.endswith("*")

        self._add("Extend.star", [(0, 0, "Line"), (0, 0, "Grid"), (1, 0, "Grid"), (0, 0, "Machine")], star)

        window = [(1, 0, "Line"), (0, 0, "Grid"), (1, 0, "Grid"), (2, 0, "Grid"),
                  (0, 0, "Machine"), (1, 0, "Machine"), (2, 0, "Machine"), (1, 1, "Machine")]

        def machine_rule(erase: bool):
            def pred(v):
                line, g0, g1, g2, a, b, c, top = v
                if not above(line) or (g1 == "R*") != erase:
                    return False
                return top != self.expected_top((a, b, c), (g0 == "R*", g1 == "R*", g2 == "R*"))

            return pred

        self._add("Comput", window, machine_rule(False))
        self._add("Erase", window, machine_rule(True))

        is_dollar = lambda s: head_of(s) is None and positive(s) == SEP  # noqa: E731
        self._add("Compar.dollar", [(0, 0, "Machine"), (0, 0, "Compar")],
                  lambda v: is_dollar(v[0]) and v[1] != GREEN)

        def spread(v):
            left, cell, conf, here = v
            return (left == GREEN and head_of(cell) is None and positive(cell) in A
                    and positive(cell) == conf and here != GREEN)

        self._add("Compar.spread", [(0, 0, "Compar"), (1, 0, "Machine"), (1, 0, "Config"), (1, 0, "Compar")], spread)
        self._add("Compar.close", [(0, 0, "Compar"), (1, 0, "Machine")],
                  lambda v: v[0] == GREEN and is_dollar(v[1]))

    def _window_counts(self, mask: Sequence[bool]) -> dict[str, int]:
        """Forbidden bottom-row/top-centre pairs of one machine window, by centre head move.

        Letters are grouped by what they contribute to the centre cell, so the
        count costs a pass over the tape letters rather than over all triples.
        """
        T = self.tape_letters
        n = len(T)

        def side(d: bool, move: str) -> Counter:
            c: Counter = Counter()
            for a in T:
                act = None if d else self._action(a)
                c[act[0] if act is not None and act[2] == move else None] += 1
            return c

        left, right = side(mask[0], "R"), side(mask[2], "L")
        centre: Counter = Counter()
        for b in T:
            act = None if mask[1] else self._action(b)
            key = "F1" if act is None else {"L": "F2", "R": "F3", "S": "F4"}[act[2]]
            centre[(key, act is not None and act[2] == "S")] += 1
        out: Counter = Counter()
        for (key, stays), cb in centre.items():
            for la, cl in left.items():
                for ra, cr in right.items():
                    heads = int(stays) + (la is not None) + (ra is not None)
                    out[key] += cb * cl * cr * (n if heads > 1 else n - 1)
        return dict(out)

    def _count_machine(self, erase: bool) -> int:
        total = 0
        for mask in itertools.product((False, True), repeat=3):
            if mask[1] != erase:
                continue
            grid_ways = math.prod(1 if d else 3 for d in mask)
            total += grid_ways * sum(self._window_counts(mask).values())
        return total * (1 + self.target.size)

    def comput_buckets(self) -> dict[str, int]:
        """Plain transition windows (no erasing) split by what the centre head does.

        ``F1``: no head at the centre; ``F2``/``F3``/``F4``: the centre head
        moves left/right/stays. The two unread top corners are free.
        """
        counts = self._window_counts((False, False, False))
        n = len(self.tape_letters)
        return {k: counts.get(k, 0) * n * n for k in ("F1", "F2", "F3", "F4")}

    # -- use ---------------------------------------------------------------

    @property
    def factor(self) -> FactorMap:
        flat = self.alphabet.flat()
        table = []
        for i in range(self.alphabet.size):
            line, conf = self.alphabet.letter(i)[:2]
            table.append(self.target.index(conf if line == MARK else line[2:]))
        return FactorMap.from_table(flat, self.target, table)

    def project(self, config: LayeredConfig) -> list[str]:
        """Target rows under the final factor, top row first."""
        out = []
        for y in reversed(range(config.height)):
            row = []
            for x in range(config.width):
                line = config.get("Line", x, y)
                row.append(config.get("Config", x, y) if line == MARK else line[2:])
            out.append("".join(row))
        return out

    def check(self, config: LayeredConfig, families: Iterable[str] | None = None) -> list[LayeredViolation]:
        """Every placement of every family window fully inside ``config``."""
        names = list(families) if families is not None else list(self.families)
        out = []
        for name in names:
            fam = self.families[name]
            for y in range(config.height - fam.height + 1):
                for x in range(config.width - fam.width + 1):
                    v = tuple(config.layers[layer][y + dy][x + dx] for dx, dy, layer in fam.slots)
                    if fam.forbidden(v):
                        out.append(LayeredViolation(name, x, y))
        return out

    def violated_families(self, config: LayeredConfig) -> set[str]:
        return {_group(v.family) for v in self.check(config)}

    def sizes(self) -> dict:
        layer_sizes = {n: a.size for n, a in zip(self.alphabet.names, self.alphabet.layers)}
        fam: dict[str, int | None] = {}
        for name in self.families:
            g, size = _group(name), self.family_size(name)
            if size is None or fam.get(g, 0) is None:
                fam[g] = None
            else:
                fam[g] = fam.get(g, 0) + size
        return {
            "machine": self.source.name,
            "w": self.w,
            "layers": layer_sizes,
            "product": self.alphabet.size,
            "families": fam,
            "comput": self.comput_buckets(),
        }

    def to_dict(self) -> dict:
        """Layer alphabets, the machine table and the explicit small families."""
        explicit = {}
        for name, f in self.families.items():
            if name in ("Comput", "Erase") or self.family_size(name) is None:
                continue
            domains = [self.alphabet.layer(s[2]).letters for s in f.slots]
            explicit[name] = {
                "slots": [list(s) for s in f.slots],
                "patterns": [list(v) for v in itertools.product(*domains) if f.forbidden(v)],
            }
        return {
            "layers": {n: list(a.letters) for n, a in zip(self.alphabet.names, self.alphabet.layers)},
            "w": self.w,
            "machine": self.machine.to_dict(),
            "families": explicit,
            "machine_windows": {
                "slots": [list(s) for s in self.families["Comput"].slots],
                "rule": "top centre equals the centre after one machine step; R* cells blank above",
            },
            "sizes": self.sizes(),
        }


def _group(name: str) -> str:
    """Report name of a family: grid patterns group by displayed sub-family."""
    parts = name.split(".")
    return ".".join(parts[:2]) if parts[0] == "Grid" else name


class AlphabetBudgetExceeded(BudgetExceeded, SftError):
    """The layered product alphabet would outgrow its letter budget."""


def layered_size_estimate(m: TmSpec, target_size: int) -> int:
    k = m.tapes
    machine = (len(m.states) * len(m.alphabet) + len(m.alphabet)) ** k
    return (2 * target_size + 1) * target_size * GRID.size * machine * 2


def compile_quick_realization(
    m: TmSpec,
    w: str,
    target: Alphabet | None = None,
    *,
    fold: bool = False,
    max_letters: int = DEFAULT_MAX_LETTERS,
) -> QuickRealization:
    """Layered rules whose marked row sees exactly the words ``m`` never enumerates.

    ``target`` defaults to the machine's tape letters other than blank and
    ``$``. With ``fold=True`` the machine is first rewritten onto tapes that
    stay right of their first cell.
    """
    if m.tapes != 1:
        raise SftError(f"the layered compiler takes single-tape machines, got {m.tapes} tapes")
    if target is None:
        target = Alphabet(tuple(a for a in m.alphabet if a not in (BLANK, SEP)))
    if not w or any(a not in target.letters for a in w):
        raise SftError(f"periodic word {w!r} must be non-empty over {list(target.letters)}")
    source = m
    if fold:
        m = fold_tapes(m)
    for q in m.states:
        if ":" in q:
            raise SftError(f"state name {q!r} may not contain ':'")
    est = layered_size_estimate(m, target.size)
    if est > max_letters:
        raise AlphabetBudgetExceeded("product alphabet too large", est, max_letters)
    return QuickRealization(m, w, target, source)


# ---------------------------------------------------------------------------
# fixtures


def quick_fixture(
    real: QuickRealization,
    row: str,
    width: int = 20,
    height: int = 20,
    line_row: int = 2,
) -> LayeredConfig:
    """Forward-simulate every layer from the marked row and crop a window.

    ``row`` gives the Config letters along anti-diagonals: cell ``(x, y)``
    reads ``row[x + y]``, so it needs ``width + height - 1`` letters. The
    simulation runs on a wider strip and crops so that edge effects stay out
    of view.
    """
    if len(row) < width + height - 1:
        raise ValueError(f"row word needs at least {width + height - 1} letters")
    m = real.machine
    margin = height + 2
    xs = range(-margin, width + margin)
    W = len(xs)
    red_even = False  # colour of x = 0 on the marked row is blue

    def base_colour(x: int) -> str:
        return "R" if (x % 2 == 0) == red_even else "B"

    colours = [[base_colour(x) for x in xs] for _ in range(height)]
    starred = [False] * height
    tape = [[BLANK] * W for _ in range(height)]
    tape[line_row] = [f"{m.start}:{BLANK}"] * W

    def crossing_row(y: int) -> bool:
        flags = set()
        for i in range(margin, margin + width):
            act = real._action(tape[y][i])
            if act is not None and act[2] == "R":
                flags.add(colours[y][i] != colours[y][i + 1])
        if len(flags) > 1:
            raise SftError(f"heads disagree about crossing zones on row {y}")
        return flags == {True}

    starred[line_row] = crossing_row(line_row)
    for y in range(line_row, height - 1):
        # zones: stars merge red|blue pairs and keep blue|red boundaries
        if starred[y]:
            nxt = [colours[y][0]]
            for i in range(1, W):
                pair = (colours[y][i - 1], colours[y][i])
                keep = pair[0] == pair[1] or pair == ("R", "B")
                nxt.append(nxt[-1] if keep else ("B" if nxt[-1] == "R" else "R"))
            colours[y + 1] = nxt
        else:
            colours[y + 1] = list(colours[y])
        dead = [starred[y] and colours[y][i] == "R" for i in range(W)]
        new = []
        for i in range(W):
            sym = BLANK if dead[i] else symbol_of(tape[y][i])
            heads = []
            if not dead[i]:
                act = real._action(tape[y][i])
                if act is not None:
                    sym = act[1]
                    if act[2] == "S":
                        heads.append(act[0])
            for j, d in ((i - 1, "R"), (i + 1, "L")):
                if 0 <= j < W and not dead[j]:
                    act = real._action(tape[y][j])
                    if act is not None and act[2] == d:
                        heads.append(act[0])
            if len(heads) > 1:
                raise SftError(f"two heads meet at ({xs[i]}, {y + 1})")
            new.append(f"{heads[0]}:{sym}" if heads else sym)
        tape[y + 1] = new
        starred[y + 1] = crossing_row(y + 1)

    cfg = LayeredConfig.blank(width, height, {n: "" for n in LAYERS})
    w = real.w
    for y in range(height):
        for x in range(width):
            i = x + margin
            if y < line_row:
                cfg.set("Line", x, y, f"d:{w[x % len(w)]}")
            elif y == line_row:
                cfg.set("Line", x, y, MARK)
            else:
                cfg.set("Line", x, y, f"u:{w[x % len(w)]}")
            cfg.set("Config", x, y, row[x + y])
            cfg.set("Grid", x, y, colours[y][i] + ("*" if starred[y] else ""))
            cfg.set("Machine", x, y, tape[y][i])
        green = False
        for x in range(width):
            cell = cfg.get("Machine", x, y)
            plain = head_of(cell) is None
            if plain and positive(cell) == SEP:
                if green and x > 0:
                    raise SftError(f"enumerated word matches the Config row at ({x}, {y})")
                green = True
            elif not (green and plain and positive(cell) == cfg.get("Config", x, y)):
                green = False
            cfg.set("Compar", x, y, GREEN if green else PLAIN)
    return cfg


def fixture_mutations(real: QuickRealization, cfg: LayeredConfig, line_row: int = 2) -> dict[str, tuple[LayeredConfig, str]]:
    """Single-cell edits of a valid fixture, each aimed at one rule family."""
    A = real.target.letters
    H, W = cfg.height, cfg.width
    out: dict[str, tuple[LayeredConfig, str]] = {}

    other = next(a for a in A if a != real.w[0])
    out["line-row"] = (cfg.with_cell("Line", 5, H - 2, f"u:{other}"), "Line.rows")

    c = cfg.get("Config", 7, 10)
    out["config-diagonal"] = (cfg.with_cell("Config", 7, 10, next(a for a in A if a != c)), "Config.diag")

    g = cfg.get("Grid", 6, H - 3)
    out["grid-partial-star"] = (cfg.with_cell("Grid", 6, H - 3, g.rstrip("*") + "*"), "Grid.F1")

    g = cfg.get("Grid", 3, 0)
    out["grid-colour"] = (cfg.with_cell("Grid", 3, 0, "B" if g.startswith("R") else "R"), "Grid.F2")

    y = H - 1
    x = next(x for x in range(1, W - 1) if head_of(cfg.get("Machine", x, y)) is None)
    cur = cfg.get("Machine", x, y)
    alt = next(s for s in real.machine.alphabet if s != cur)
    out["tape-change"] = (cfg.with_cell("Machine", x, y, alt), "Comput")

    q = next(s for s in real.machine.states if s != real.machine.start)
    out["init-state"] = (cfg.with_cell("Machine", 5, line_row, f"{q}:{BLANK}"), "Init")

    spot = next(((x, y) for y in range(line_row, H - 1) for x in range(1, W - 1)
                 if cfg.get("Grid", x, y) == "R*" and cfg.get("Machine", x, y + 1) == BLANK), None)
    if spot is not None:
        x, y = spot
        filler = next(s for s in real.machine.alphabet if s != BLANK)
        out["erase"] = (cfg.with_cell("Machine", x, y + 1, filler), "Erase")

    spot = next(((x, y) for y in range(H) for x in range(W) if cfg.get("Compar", x, y) == GREEN), None)
    if spot is not None:
        out["compar-dollar"] = (cfg.with_cell("Compar", spot[0], spot[1], PLAIN), "Compar.dollar")
    return out


def golden_fixture_machine() -> TmSpec:
    """Four states over ``# $ 0 1`` that enumerate the single word ``11``."""
    from ..tm import golden_enumerator

    return golden_enumerator()
