"""Multi-tape Turing machines, enumerators and enumeration complexity.

Tapes are two-way infinite and blank (``#``) outside a finite set of cells.
An enumerator writes words on tape 0; each time it enters one of its
``emit`` states, the cells written on tape 0 since the previous emission, up to the
head, form one emitted word. The machine then writes a ``$`` separator and
moves on. Emission boundaries come from the state, so targets whose alphabet
itself contains ``$`` are enumerated without ambiguity.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .core import Alphabet
from .lang import EffectiveOracle, TruncatedListOracle

BLANK = "#"
SEP = "$"
MOVES = {"L": -1, "S": 0, "R": 1}
REJECT = "reject"

Key = tuple  # (state, reads)
Action = tuple  # (state, writes, moves)


class MachineHalted(RuntimeError):
    pass


class EnumerationBudgetExceeded(RuntimeError):
    def __init__(self, message: str, witness: tuple[str, ...] | None, steps: int):
        super().__init__(message)
        self.witness = witness
        self.steps = steps


@dataclass(frozen=True)
class TmSpec:
    tapes: int
    states: tuple[str, ...]
    start: str
    alphabet: tuple[str, ...]
    delta: Mapping[Key, Action]
    final: frozenset[str]
    emit: frozenset[str] = frozenset()
    name: str = "machine"

    def __post_init__(self) -> None:
        if self.tapes < 1:
            raise ValueError("a machine needs at least one tape")
        if self.start not in self.states:
            raise ValueError(f"start state {self.start!r} is not a state")
        if BLANK not in self.alphabet or SEP not in self.alphabet:
            raise ValueError("tape alphabet must contain '#' and '$'")
        for q in self.emit:
            if q not in self.states:
                raise ValueError(f"emit state {q!r} is not a state")
        for q in self.states:
            if q in self.final:
                continue
            for reads in itertools.product(self.alphabet, repeat=self.tapes):
                if (q, reads) not in self.delta:
                    raise ValueError(f"transition missing for state {q!r} reading {reads}")
        for (q, reads), (q2, writes, moves) in self.delta.items():
            if q2 not in self.states:
                raise ValueError(f"transition from {q!r} targets unknown state {q2!r}")
            if len(writes) != self.tapes or len(moves) != self.tapes:
                raise ValueError(f"transition from {q!r} has the wrong arity")
            if any(w not in self.alphabet for w in writes) or any(mv not in MOVES for mv in moves):
                raise ValueError(f"transition from {q!r} writes an unknown letter or move")

    def to_dict(self) -> dict:
        rows = [
            [q, list(reads), q2, list(writes), list(moves)]
            for (q, reads), (q2, writes, moves) in sorted(self.delta.items())
        ]
        return {
            "name": self.name,
            "tapes": self.tapes,
            "states": list(self.states),
            "start": self.start,
            "alphabet": list(self.alphabet),
            "final": sorted(self.final),
            "emit": sorted(self.emit),
            "transitions": rows,
        }

    @classmethod
    def from_dict(cls, doc: Mapping, where: str = "<machine>") -> "TmSpec":
        def need(key):
            if key not in doc:
                raise ValueError(f"{where}: missing field {key!r}")
            return doc[key]

        delta = {}
        for i, row in enumerate(need("transitions")):
            try:
                q, reads, q2, writes, moves = row
            except (TypeError, ValueError):
                raise ValueError(f"{where}: field 'transitions[{i}]' must have five entries") from None
            delta[(q, tuple(reads))] = (q2, tuple(writes), tuple(moves))
        return cls(
            int(need("tapes")),
            tuple(need("states")),
            need("start"),
            tuple(need("alphabet")),
            delta,
            frozenset(need("final")),
            frozenset(doc.get("emit", ())),
            doc.get("name", "machine"),
        )


def dumps_tm(m: TmSpec) -> str:
    return json.dumps(m.to_dict(), indent=1, sort_keys=True)


def loads_tm(text: str, where: str = "<machine>") -> TmSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{where}: malformed JSON ({exc})") from None
    return TmSpec.from_dict(doc, where)


class TmBuilder:
    """Transition tables with ``*`` wildcards.

    A ``*`` read matches any letter and a ``*`` write keeps the letter read.
    Earlier rules win. ``build`` sends every unlisted case to ``reject``.
    """

    def __init__(self, tapes: int, alphabet: Sequence[str], name: str = "machine"):
        self.tapes = tapes
        self.alphabet = tuple(alphabet)
        self.name = name
        self.rules: list[tuple[str, tuple, str, tuple, tuple]] = []
        self.states: list[str] = []

    def _state(self, q: str) -> None:
        if q not in self.states:
            self.states.append(q)

    def add(self, q: str, reads: str | Sequence[str], q2: str, writes: str | Sequence[str], moves: str | Sequence[str]):
        reads, writes, moves = (tuple(x) if not isinstance(x, str) else tuple(x) for x in (reads, writes, moves))
        if not (len(reads) == len(writes) == len(moves) == self.tapes):
            raise ValueError(f"rule from {q!r} has the wrong arity")
        self._state(q)
        self._state(q2)
        self.rules.append((q, reads, q2, writes, moves))
        return self

    def build(self, start: str, final: Iterable[str], emit: Iterable[str] = ()) -> TmSpec:
        final = set(final)
        for q in final:
            self._state(q)
        delta: dict = {}
        for q, reads, q2, writes, moves in self.rules:
            options = [self.alphabet if r == "*" else (r,) for r in reads]
            for combo in itertools.product(*options):
                key = (q, combo)
                if key in delta:
                    continue
                w = tuple(c if x == "*" else x for c, x in zip(combo, writes))
                delta[key] = (q2, w, moves)
        missing = [(q, combo) for q in self.states if q not in final
                   for combo in itertools.product(self.alphabet, repeat=self.tapes) if (q, combo) not in delta]
        if missing:
            # unspecified transitions go to a halting reject state
            self._state(REJECT)
            final.add(REJECT)
            for key in missing:
                delta[key] = (REJECT, key[1], ("S",) * self.tapes)
        return TmSpec(self.tapes, tuple(self.states), start, self.alphabet, delta, frozenset(final),
                      frozenset(emit), self.name)


# ---------------------------------------------------------------------------
# configurations


@dataclass
class MachineConfig:
    state: str
    tapes: list[dict[int, str]]
    heads: list[int]
    steps: int = 0
    low: list[int] = field(default_factory=list)
    high: list[int] = field(default_factory=list)

    @classmethod
    def initial(cls, m: TmSpec, inputs: Sequence[str] | None = None) -> "MachineConfig":
        tapes = [dict() for _ in range(m.tapes)]
        for t, word in enumerate(inputs or ()):
            for i, c in enumerate(word):
                if c != BLANK:
                    tapes[t][i] = c
        return cls(m.start, tapes, [0] * m.tapes, 0, [0] * m.tapes, [0] * m.tapes)

    def copy(self) -> "MachineConfig":
        return MachineConfig(self.state, [dict(t) for t in self.tapes], list(self.heads), self.steps,
                             list(self.low), list(self.high))

    def read(self, t: int, pos: int | None = None) -> str:
        return self.tapes[t].get(self.heads[t] if pos is None else pos, BLANK)

    @property
    def space(self) -> int:
        """Cells visited so far, summed over tapes."""
        return sum(h - l + 1 for l, h in zip(self.low, self.high))


def _apply(c: MachineConfig, m: TmSpec) -> None:
    if c.state in m.final:
        raise MachineHalted(f"machine halted in state {c.state!r}")
    reads = tuple(c.read(t) for t in range(m.tapes))
    q2, writes, moves = m.delta[(c.state, reads)]
    for t in range(m.tapes):
        pos = c.heads[t]
        if writes[t] == BLANK:
            c.tapes[t].pop(pos, None)
        else:
            c.tapes[t][pos] = writes[t]
        pos += MOVES[moves[t]]
        c.heads[t] = pos
        c.low[t] = min(c.low[t], pos)
        c.high[t] = max(c.high[t], pos)
    c.state = q2
    c.steps += 1


def step(c: MachineConfig, m: TmSpec) -> MachineConfig:
    """One transition, returning a new configuration."""
    nxt = c.copy()
    _apply(nxt, m)
    return nxt


@dataclass
class RunResult:
    config: MachineConfig
    halted: bool


def run(m: TmSpec, inputs: Sequence[str] | None = None, budget_steps: int = 10_000) -> RunResult:
    c = MachineConfig.initial(m, inputs)
    while c.steps < budget_steps and c.state not in m.final:
        _apply(c, m)
    return RunResult(c, c.state in m.final)


# ---------------------------------------------------------------------------
# space-time diagrams


@dataclass
class SpaceTimeDiagram:
    """Snapshots of the window ``lo..hi`` of every tape, one per step."""

    lo: int
    hi: int
    rows: list[tuple[str, tuple[tuple[str, ...], ...], tuple[int, ...]]]

    def render(self, tape: int = 0) -> str:
        out = []
        for state, cells, heads in self.rows:
            line = "".join(
                f"[{c}]" if self.lo + i == heads[tape] else f" {c} " for i, c in enumerate(cells[tape])
            )
            out.append(f"{state:>10} |{line}")
        return "\n".join(out)

    def consistent(self, m: TmSpec) -> bool:
        """Each row follows from the previous by exactly one transition."""
        for (q, cells, heads), nxt in zip(self.rows, self.rows[1:]):
            c = MachineConfig(q, [
                {self.lo + i: x for i, x in enumerate(tape) if x != BLANK} for tape in cells
            ], list(heads), 0, list(heads), list(heads))
            _apply(c, m)
            if self._snap(c) != nxt:
                return False
        return True

    def _snap(self, c: MachineConfig):
        cells = tuple(tuple(c.read(t, p) for p in range(self.lo, self.hi + 1)) for t in range(len(c.tapes)))
        return (c.state, cells, tuple(c.heads))


def space_time_diagram(m: TmSpec, inputs: Sequence[str] | None = None, steps: int = 50) -> SpaceTimeDiagram:
    configs = [MachineConfig.initial(m, inputs)]
    while len(configs) <= steps and configs[-1].state not in m.final:
        configs.append(step(configs[-1], m))
    last = configs[-1]
    lo = min(min(last.low), 0)
    hi = max(max(last.high), max((max(t, default=0) for t in last.tapes), default=0))
    d = SpaceTimeDiagram(lo, hi, [])
    d.rows = [d._snap(c) for c in configs]
    return d


# ---------------------------------------------------------------------------
# enumeration


@dataclass(frozen=True)
class Emission:
    word: tuple[str, ...]
    step: int
    space: int


@dataclass
class Enumeration:
    emissions: list[Emission]
    steps: int
    incomplete: bool


def _enumerate(m: TmSpec, budget_steps: int):
    """Yield emissions lazily; the generator's return value is the step count."""
    if not m.emit:
        raise ValueError("machine has no emit state")
    c = MachineConfig.initial(m)
    start = 0
    while c.steps < budget_steps and c.state not in m.final:
        _apply(c, m)
        if c.state in m.emit:
            head = c.heads[0]
            word = tuple(c.read(0, p) for p in range(start, head))
            start = head + 1
            yield Emission(word, c.steps, c.space)
    return c


def run_enumerator(m: TmSpec, budget_steps: int) -> Enumeration:
    """Every emission within ``budget_steps``; a run that does not halt is flagged incomplete."""
    gen = _enumerate(m, budget_steps)
    out = []
    while True:
        try:
            out.append(next(gen))
        except StopIteration as stop:
            c = stop.value
            break
    return Enumeration(out, c.steps, c.state not in m.final)


def _escaping_word(words: list[tuple[int, ...]], target: EffectiveOracle, k: int) -> tuple[int, ...] | None:
    """A length-``k`` word allowed by the forbidden list but outside the target, if any."""
    approx = TruncatedListOracle(target.alphabet, words)
    layer = {(approx.start(), target.start()): ()}
    for _ in range(k):
        nxt = {}
        for (sa, st), w in layer.items():
            for c in range(target.alphabet.size):
                ta = approx.step(sa, c)
                if ta is None:
                    continue
                tt = target.step(st, c)
                if tt is None:
                    return w + (c,)  # prefixes of allowed words stay allowed
                nxt.setdefault((ta, tt), w + (c,))
        layer = nxt
    return None


def measure_enum_complexity(m: TmSpec, target: EffectiveOracle, k: int, budget: int) -> tuple[int, int]:
    """(time, space) at which the emitted words first exclude every non-target word of length ``k``."""
    if not target.exact:
        raise ValueError("enumeration complexity needs an exact oracle")
    if k < 1:
        raise ValueError("k must be positive")
    words: list[tuple[int, ...]] = []
    if _escaping_word(words, target, k) is None:
        return (0, 0)
    witness = None
    for e in _enumerate(m, budget):
        try:
            words.append(tuple(target.alphabet.index(x) for x in e.word))
        except KeyError:
            continue  # letters outside the target alphabet forbid nothing
        witness = _escaping_word(words, target, k)
        if witness is None:
            return (e.step, e.space)
    if witness is None:
        witness = _escaping_word(words, target, k)
    text = target.alphabet.render(witness) if witness else None
    raise EnumerationBudgetExceeded(
        f"enumeration budget of {budget} steps exhausted; {text!r} is still allowed",
        tuple(target.alphabet.name(c) for c in witness) if witness else None,
        budget,
    )


# ---------------------------------------------------------------------------
# fixtures

GOLD = ("#", "$", "0", "1")


def golden_enumerator() -> TmSpec:
    """Writes ``11``, emits it once, writes the separator and then idles."""
    b = TmBuilder(1, GOLD, "golden")
    b.add("q0", "*", "q1", "1", "R")
    b.add("q1", "*", "emit", "1", "R")
    b.add("emit", "*", "idle", "$", "R")
    b.add("idle", "*", "idle", "*", "S")
    return b.build("q0", (), emit=("emit",))


def silent_machine() -> TmSpec:
    """Walks right forever without emitting."""
    b = TmBuilder(1, GOLD, "silent")
    b.add("q0", "*", "q0", "*", "R")
    b.add("emit", "*", "emit", "*", "S")
    return b.build("q0", (), emit=("emit",))


def unary_incrementer() -> TmSpec:
    """Appends a ``1`` to a unary number and halts."""
    b = TmBuilder(1, GOLD, "incrementer")
    b.add("q0", "1", "q0", "1", "R")
    b.add("q0", "#", "qF", "1", "R")
    return b.build("q0", ("qF",))


def one_step_halter() -> TmSpec:
    b = TmBuilder(1, GOLD, "halter")
    b.add("q0", "#", "qF", "#", "S")
    return b.build("q0", ("qF",))


BLOCK = ("#", "$", "a", "b", "1")


def block_enumerator() -> TmSpec:
    """Two-tape enumerator of the forbidden words of equal a/b blocks.

    Emits ``$b`` and ``a$`` first. Then, with ``p`` in unary on tape 1 for
    ``p = 1, 2, ...``, it emits the four overflow words ``$a^p b^(p+1)``,
    ``ba^p b^(p+1)``, ``a^(p+1) b^p $`` and ``a^(p+1) b^p a``.
    """
    b = TmBuilder(2, BLOCK, "blocks")
    emit_states: list[str] = []
    counter = 0

    def fresh(tag: str) -> str:
        nonlocal counter
        counter += 1
        return f"{tag}{counter}"

    def put(q: str, letters: str, nxt: str) -> None:
        for c in letters[:-1]:
            mid = fresh("w")
            b.add(q, "**", mid, (c, "*"), "RS")
            q = mid
        b.add(q, "**", nxt, (letters[-1], "*"), "RS")

    def copy(q: str, letter: str, nxt: str) -> None:
        # one letter per unary cell on tape 1, then rewind tape 1
        rew = fresh("rew")
        b.add(q, ("*", "1"), q, (letter, "*"), "RR")
        b.add(q, "**", rew, "**", "SL")
        b.add(rew, ("*", "1"), rew, "**", "SL")
        b.add(rew, "**", nxt, "**", "SR")

    def emit(q: str, nxt: str) -> None:
        e = fresh("emit")
        b.add(q, "**", e, "**", "SS")
        b.add(e, "**", nxt, ("$", "*"), "RS")
        emit_states.append(e)

    def word(q: str, head: str, tail: str, nxt: str) -> None:
        # head a^p b^p tail
        s1, s2, s3, s4 = fresh("w"), fresh("w"), fresh("w"), fresh("w")
        put(q, head, s1)
        copy(s1, "a", s2)
        copy(s2, "b", s3)
        put(s3, tail, s4)
        emit(s4, nxt)

    s1, s2 = fresh("w"), fresh("w")
    put("init", "$b", s1)
    emit(s1, s2)
    s3 = fresh("w")
    put(s2, "a$", s3)
    emit(s3, "seed")
    b.add("seed", "**", "round", ("*", "1"), "SS")
    plan = [("$", "b"), ("b", "b"), ("a", "$"), ("a", "a")]
    q = "round"
    for j, (head, tail) in enumerate(plan):
        nxt = fresh("word") if j + 1 < len(plan) else "grow"
        word(q, head, tail, nxt)
        q = nxt
    # append a cell to tape 1 and rewind
    b.add("grow", ("*", "1"), "grow", "**", "SR")
    b.add("grow", "**", "back", ("*", "1"), "SL")
    b.add("back", ("*", "1"), "back", "**", "SL")
    b.add("back", "**", "round", "**", "SR")
    return b.build("init", (), emit=emit_states)


FIXTURES = {
    "golden": golden_enumerator,
    "blocks": block_enumerator,
    "silent": silent_machine,
    "incrementer": unary_incrementer,
    "halter": one_step_halter,
}
