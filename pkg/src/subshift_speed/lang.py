"""Target subshifts: exact membership oracles, truncated word lists, follower sets.

Every oracle is a deterministic step automaton over the target alphabet.
``start()`` gives the initial state and ``step(state, letter)`` returns the
next state or ``None`` once the word read so far has left the language.
States are hashable, so the speed module can run products against strips.
"""

from __future__ import annotations

import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from .core import Alphabet
from .strip import LanguageBudgetExceeded, LanguageSet, DEFAULT_MAX_LANGUAGE

State = Hashable

EXACT = "exact-predicate"
TRUNCATED = "forbidden-word-list"
APPROX_LABEL = "upper-language approximation"


class EffectiveOracle:
    """Base class for target subshifts over a one-dimensional alphabet."""

    name: str = "oracle"
    kind: str = EXACT

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet

    def start(self) -> State:
        raise NotImplementedError

    def step(self, state: State, letter: int) -> State | None:
        raise NotImplementedError

    @property
    def exact(self) -> bool:
        return self.kind == EXACT

    @property
    def metadata(self) -> dict:
        return {"oracle": self.name, "kind": self.kind}

    def run(self, word: Sequence[int]) -> State | None:
        s = self.start()
        for c in word:
            s = self.step(s, c)
            if s is None:
                return None
        return s

    def contains(self, word: Sequence[int] | str) -> bool:
        if isinstance(word, str):
            word = self.alphabet.parse(word)
        return self.run(word) is not None

    def language_of(self, k: int, max_words: int = DEFAULT_MAX_LANGUAGE) -> LanguageSet:
        return oracle_language(self, k, max_words=max_words)


class FullShiftOracle(EffectiveOracle):
    name = "fullshift"

    def start(self) -> State:
        return 0

    def step(self, state: State, letter: int) -> State | None:
        return 0


class GoldenMeanOracle(EffectiveOracle):
    """Binary words with no two consecutive 1s."""

    name = "golden"

    def __init__(self, alphabet: Alphabet | None = None):
        super().__init__(alphabet or Alphabet(("0", "1")))
        self._one = self.alphabet.index("1")

    def start(self) -> State:
        return False

    def step(self, state: State, letter: int) -> State | None:
        one = letter == self._one
        if one and state:
            return None
        return one


class BlockEqualOracle(EffectiveOracle):
    """Rows built from ``$`` and blocks ``a^n b^n``; a block may follow a block.

    The state tracks the open run: ``("$",)``, ``("a", p, complete)``,
    ``("bc", d)`` after a complete a-run (exactly ``d`` more b needed) and
    ``("bt", d)`` after a truncated one (at least ``d`` more b needed).
    """

    name = "sigma_eq"

    def __init__(self, alphabet: Alphabet | None = None):
        super().__init__(alphabet or Alphabet(("a", "b", "$")))
        self.a = self.alphabet.index("a")
        self.b = self.alphabet.index("b")
        self.d = self.alphabet.index("$")

    def start(self) -> State:
        return ("init",)

    def _close(self, state: tuple) -> bool:
        """Can the current run end here (next letter is not its own)?"""
        tag = state[0]
        if tag in ("bc", "bt"):
            return state[1] == 0
        return True

    def step(self, state: State, letter: int) -> State | None:
        tag = state[0]
        if letter == self.a:
            if tag == "a":
                return ("a", state[1] + 1, state[2])
            if tag == "init":
                return ("a", 1, False)
            if tag == "$" or self._close(state):
                return ("a", 1, True)
            return None
        if letter == self.b:
            if tag == "a":
                return ("bc", state[1] - 1) if state[2] else ("bt", state[1] - 1)
            if tag == "bc":
                return ("bc", state[1] - 1) if state[1] > 0 else None
            if tag == "bt":
                return ("bt", max(state[1] - 1, 0))
            if tag == "init":
                return ("bt", 0)
            return None  # "$b"
        # letter == $
        if tag == "a":
            return None  # "a$"
        if tag in ("bc", "bt") and not self._close(state):
            return None
        return ("$",)


class DollarLanguageOracle(EffectiveOracle):
    """Subshift forbidding ``$u$`` for every ``u`` outside a base language.

    Only segments closed by ``$`` on both sides are tested; the open parts at
    either end are unconstrained, which is exact as long as every word over the
    base alphabet extends to a member of the base language on the open side.
    """

    name = "dollar"

    def __init__(self, alphabet: Alphabet, member, *, dollar: str = "$"):
        super().__init__(alphabet)
        self.d = alphabet.index(dollar)
        self.member = member

    def start(self) -> State:
        return "open"  # no $ read yet

    def step(self, state: State, letter: int) -> State | None:
        if state == "open":
            return () if letter == self.d else state
        if letter == self.d:
            return () if self.member(state) else None
        return state + (letter,)


class EqualBlocksOracle(DollarLanguageOracle):
    """Words whose closed segments are ``a^n b^n`` (n may be 0)."""

    name = "t_l_eq"

    def __init__(self, alphabet: Alphabet | None = None):
        alphabet = alphabet or Alphabet(("a", "b", "$"))
        a, b = alphabet.index("a"), alphabet.index("b")

        def member(u: tuple) -> bool:
            n = len(u)
            return n % 2 == 0 and all(c == a for c in u[: n // 2]) and all(c == b for c in u[n // 2 :])

        super().__init__(alphabet, member)


class PalindromeOracle(DollarLanguageOracle):
    """Words whose closed segments are even palindromes over ``{0,1}``."""

    name = "palin"

    def __init__(self, alphabet: Alphabet | None = None):
        alphabet = alphabet or Alphabet(("0", "1", "$"))

        def member(u: tuple) -> bool:
            return len(u) % 2 == 0 and u == u[::-1]

        super().__init__(alphabet, member)


class TruncatedListOracle(EffectiveOracle):
    """Subshift avoiding a finite list of words (the first K of a longer list).

    The language is read off the de Bruijn graph of order ``m = longest - 1``
    after removing vertices that cannot be prolonged on both sides, so words
    that only occur in dead ends are rejected too.
    """

    name = "truncated"
    kind = TRUNCATED

    def __init__(self, alphabet: Alphabet, words: Iterable[Sequence[int]], truncation: int | None = None):
        super().__init__(alphabet)
        self.words = tuple(sorted({tuple(w) for w in words}))
        if any(len(w) == 0 for w in self.words):
            raise ValueError("empty forbidden word")
        self.truncation = truncation if truncation is not None else max((len(w) for w in self.words), default=0)
        self.m = max(1, max((len(w) for w in self.words), default=1) - 1)
        self._build()

    @classmethod
    def from_text(cls, alphabet: Alphabet, text: str, truncation: int | None = None) -> "TruncatedListOracle":
        words = [alphabet.parse(line.strip()) for line in text.splitlines() if line.strip()]
        return cls(alphabet, words, truncation)

    @property
    def metadata(self) -> dict:
        return {"oracle": self.name, "kind": self.kind, "K": self.truncation, "label": APPROX_LABEL}

    def _clean(self, w: tuple) -> bool:
        n = len(w)
        for f in self.words:
            lf = len(f)
            for i in range(n - lf + 1):
                if w[i : i + lf] == f:
                    return False
        return True

    def _build(self) -> None:
        import itertools

        a, m = self.alphabet.size, self.m
        if a ** (m + 1) > DEFAULT_MAX_LANGUAGE:
            raise LanguageBudgetExceeded("language budget exceeded", a ** (m + 1), DEFAULT_MAX_LANGUAGE)
        edges = {w for w in itertools.product(range(a), repeat=m + 1) if self._clean(w)}
        # iterated source/sink removal on the order-m graph
        changed = True
        while changed:
            heads = {e[1:] for e in edges}
            tails = {e[:-1] for e in edges}
            keep = {e for e in edges if e[:-1] in heads and e[1:] in tails}
            changed = keep != edges
            edges = keep
        self.edges = frozenset(edges)
        short: set[tuple] = set()
        for e in edges:
            for i in range(len(e)):
                for j in range(i + 1, len(e) + 1):
                    short.add(e[i:j])
        self.short = frozenset(short)

    def start(self) -> State:
        return ()

    def step(self, state: State, letter: int) -> State | None:
        w = state + (letter,)
        if len(w) <= self.m:
            return w if w in self.short else None
        if w not in self.edges:
            return None
        return w[1:]


class ProductOracle(EffectiveOracle):
    """Union or intersection of two oracles over one alphabet."""

    def __init__(self, a: EffectiveOracle, b: EffectiveOracle, mode: str = "and"):
        if a.alphabet != b.alphabet:
            raise ValueError("oracle alphabets differ")
        if mode not in ("and", "or"):
            raise ValueError("mode must be 'and' or 'or'")
        super().__init__(a.alphabet)
        self.a, self.b, self.mode = a, b, mode
        self.name = f"({a.name} {mode} {b.name})"
        self.kind = EXACT if a.exact and b.exact else TRUNCATED

    def start(self) -> State:
        return (self.a.start(), self.b.start())

    def step(self, state: State, letter: int) -> State | None:
        sa, sb = state
        ta = self.a.step(sa, letter) if sa is not None else None
        tb = self.b.step(sb, letter) if sb is not None else None
        if self.mode == "and":
            return (ta, tb) if ta is not None and tb is not None else None
        return (ta, tb) if ta is not None or tb is not None else None


def oracle_language(o: EffectiveOracle, k: int, *, max_words: int = DEFAULT_MAX_LANGUAGE) -> LanguageSet:
    """All length-``k`` words accepted by the oracle."""
    if k < 1:
        raise ValueError("k must be positive")
    layer: dict[tuple, State] = {(): o.start()}
    for _ in range(k):
        nxt: dict[tuple, State] = {}
        for w, s in layer.items():
            for c in range(o.alphabet.size):
                t = o.step(s, c)
                if t is not None:
                    nxt[w + (c,)] = t
        if len(nxt) > max_words:
            raise LanguageBudgetExceeded("language budget exceeded", len(nxt), max_words)
        layer = nxt
    meta = dict(o.metadata)
    meta["source"] = "oracle"
    return LanguageSet(k, o.alphabet, frozenset(layer), meta)


# ---------------------------------------------------------------------------
# follower sets


@dataclass
class FollowerTable:
    k1: int
    k2: int
    alphabet: Alphabet
    classes: list[list[tuple[int, ...]]]
    followers: list[frozenset[tuple[int, ...]]] = field(repr=False)

    @property
    def class_count(self) -> int:
        return len(self.classes)

    def to_dict(self) -> dict:
        render = self.alphabet.render
        return {
            "k1": self.k1,
            "k2": self.k2,
            "class_count": self.class_count,
            "classes": [
                {"words": [render(u) for u in cls], "follower_size": len(f)}
                for cls, f in zip(self.classes, self.followers)
            ],
        }


def follower_sets(o: EffectiveOracle, k1: int, k2: int, *, max_words: int = DEFAULT_MAX_LANGUAGE) -> FollowerTable:
    """Partition ``A^k1`` by the set of length-``k2`` continuations inside the language."""
    import itertools

    a = o.alphabet.size
    if a**k1 > max_words or a**k2 > max_words:
        raise LanguageBudgetExceeded("language budget exceeded", max(a**k1, a**k2), max_words)
    lang_k2 = oracle_language(o, k2, max_words=max_words).words
    groups: dict[frozenset, list[tuple[int, ...]]] = defaultdict(list)
    cache: dict[State, frozenset] = {}
    for u in itertools.product(range(a), repeat=k1):
        s = o.run(u)
        if s is None:
            fol: frozenset = frozenset()
        elif s in cache:
            fol = cache[s]
        else:
            fol = frozenset(v for v in lang_k2 if _continues(o, s, v))
            cache[s] = fol
        groups[fol].append(u)
    ordered = sorted(groups.items(), key=lambda kv: kv[1][0])
    return FollowerTable(k1, k2, o.alphabet, [g for _, g in ordered], [f for f, _ in ordered])


def _continues(o: EffectiveOracle, s: State, v: Sequence[int]) -> bool:
    for c in v:
        s = o.step(s, c)
        if s is None:
            return False
    return True


def brute_follower_count(o: EffectiveOracle, k1: int, k2: int) -> int:
    """Independent count: test every ``uv`` with ``contains`` and no state sharing."""
    import itertools

    a = o.alphabet.size
    seen = set()
    for u in itertools.product(range(a), repeat=k1):
        fol = frozenset(v for v in itertools.product(range(a), repeat=k2) if o.contains(v) and o.contains(u + v))
        seen.add(fol)
    return len(seen)


@dataclass
class FollowerBoundReport:
    class_count: int
    lhs_bits: float  # log2(class_count) ** (1 / (d - 1))
    phi: int
    d: int
    min_M: int | None  # smallest integer M with M * phi >= lhs; None if phi = 0 and lhs > 0
    holds: bool

    def to_dict(self) -> dict:
        return {
            "class_count": self.class_count,
            "log_side": round(self.lhs_bits, 6),
            "phi": self.phi,
            "d": self.d,
            "min_M": self.min_M,
            "holds": self.holds,
        }


def check_follower_bound(table: FollowerTable, phi_value: int, d: int = 2, M: int | None = None) -> FollowerBoundReport:
    """Compare ``M * phi(k1+k2)`` with ``log2(class_count) ** (1/(d-1))``."""
    if d < 2:
        raise ValueError("d must be at least 2")
    lhs = math.log2(table.class_count) ** (1.0 / (d - 1)) if table.class_count > 1 else 0.0
    if lhs == 0:
        need: int | None = 0
    elif phi_value == 0:
        need = None
    else:
        need = max(1, math.ceil(lhs / phi_value - 1e-12))
    if M is None:
        holds = need is not None
    else:
        holds = M * phi_value >= lhs - 1e-12
    return FollowerBoundReport(table.class_count, lhs, phi_value, d, need, holds)


# ---------------------------------------------------------------------------
# registry

ORACLES = {
    "fullshift": lambda: FullShiftOracle(Alphabet(("0", "1"))),
    "golden": GoldenMeanOracle,
    "sigma_eq": BlockEqualOracle,
    "t_l_eq": EqualBlocksOracle,
    "palin": PalindromeOracle,
}


def get_oracle(name: str) -> EffectiveOracle:
    try:
        return ORACLES[name]()
    except KeyError:
        raise ValueError(f"unknown oracle {name!r}; choose from {', '.join(sorted(ORACLES))}") from None
