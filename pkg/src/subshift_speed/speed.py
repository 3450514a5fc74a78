"""Speed of convergence: measurement, profiles, comparison, non-membership.

Indexing convention, fixed here for the whole package: words have length
``k`` and occupy columns ``0..k-1``; the strip of half-width ``n`` covers
rows ``-n..n`` and reads the projected letters of row 0. ``phi(k)`` is the
smallest ``n`` at which every length-``k`` word of the projected strip is a
word of the target.

Bad words are searched in the product of the strip graph with the oracle
automaton, a layer at a time, with vertex sets held as numpy masks.
"""

from __future__ import annotations

import csv
import io
import json
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .core import FactorMap, SftDef
from .lang import EffectiveOracle
from .strip import (
    DEFAULT_MAX_LANGUAGE,
    BudgetExceeded,
    StripBuilder,
    StripGraph,
    projected_labels,
    strip_language,
)

DEFAULT_PAIR_BUDGET = 200_000
DEAD = "dead"


class NotARealization(RuntimeError):
    """A target word is missing from a strip language."""

    def __init__(self, word: tuple, n: int, rendered: str):
        super().__init__(f"not a realization: target word {rendered!r} is missing from the strip of half-width {n}")
        self.word = word
        self.n = n


@dataclass(frozen=True)
class Exceeded:
    """No width up to ``n_budget`` removed every bad word of length ``k``."""

    k: int
    n_budget: int
    witness: tuple[int, ...]
    witness_text: str
    truncation: int | None = None
    reason: str = "n budget"

    def __bool__(self) -> bool:
        return False


@dataclass
class Measurement:
    k: int
    n: int | None
    strip_lang_size: int | None
    target_lang_size: int | None
    wall_ms: float
    status: str
    vertices: int = 0
    soundness: str = "unchecked"
    exceeded: Exceeded | None = None


class SpeedMeter:
    """Caches strip graphs of one realization and answers speed questions about it."""

    def __init__(
        self,
        sft: SftDef,
        factor: FactorMap,
        oracle: EffectiveOracle | None = None,
        *,
        max_vertices: int | None = None,
        pair_budget: int = DEFAULT_PAIR_BUDGET,
    ):
        if oracle is not None and factor.target != oracle.alphabet:
            raise ValueError("factor target and oracle alphabet differ")
        if not factor.letter_to_letter:
            raise ValueError("only letter-to-letter factors are supported")
        self.sft, self.factor, self.oracle = sft, factor, oracle
        self.builder = StripBuilder(sft, max_vertices)
        self.pair_budget = pair_budget
        self._graphs: dict[int, StripGraph] = {}
        self._lock = threading.Lock()
        self.explored: dict[int, int] = {}

    # -- graphs ------------------------------------------------------------

    def graph(self, n: int) -> StripGraph:
        with self._lock:
            if n not in self._graphs:
                g = self.builder.graph(n)
                self._graphs[n] = g
                self.explored[n] = len(g)
            return self._graphs[n]

    def _arrays(self, n: int):
        g = self.graph(n)
        lab = projected_labels(g, self.factor)
        masks = [lab == c for c in range(self.factor.target.size)]
        indptr = np.searchsorted(g.src, np.arange(len(g) + 1))
        return g, masks, indptr

    # -- bad words -----------------------------------------------------------

    def _layers(self, n: int, k: int):
        """Yield (depth, {oracle state or DEAD: vertex mask}) for depths 1..k."""
        o = self.oracle
        g, masks, _ = self._arrays(n)
        layer: dict = {}
        s0 = o.start()
        for c, m in enumerate(masks):
            if m.any():
                t = o.step(s0, c)
                t = DEAD if t is None else t
                layer[t] = layer[t] | m if t in layer else m
        yield 1, layer
        for depth in range(2, k + 1):
            nxt: dict = {}
            for s, x in layer.items():
                y = np.zeros(len(g), dtype=bool)
                y[g.dst[x[g.src]]] = True
                for c, mc in enumerate(masks):
                    m = y & mc
                    if m.any():
                        t = DEAD if s == DEAD else o.step(s, c)
                        t = DEAD if t is None else t
                        nxt[t] = nxt[t] | m if t in nxt else m
            layer = nxt
            yield depth, layer

    def has_bad_word(self, n: int, k: int) -> bool:
        for _, layer in self._layers(n, k):
            if DEAD in layer:
                return True
        return False

    def smallest_bad_word(self, n: int, k: int) -> tuple[int, ...] | None:
        """Lexicographically least length-``k`` strip word rejected by the oracle."""
        o = self.oracle
        g, masks, _ = self._arrays(n)
        V = len(g)
        failed: set = set()

        def succ(x: np.ndarray) -> np.ndarray:
            y = np.zeros(V, dtype=bool)
            y[g.dst[x[g.src]]] = True
            return y

        def extend(x: np.ndarray, left: int) -> tuple[int, ...]:
            out = []
            for _ in range(left):
                y = succ(x)
                for c, mc in enumerate(masks):
                    if (y & mc).any():
                        out.append(c)
                        x = y & mc
                        break
            return tuple(out)

        def search(s, y: np.ndarray, left: int) -> tuple[int, ...] | None:
            # y: vertices that may carry the next letter
            key = (s, left, y.tobytes())
            if key in failed:
                return None
            for c, mc in enumerate(masks):
                m = y & mc
                if not m.any():
                    continue
                t = o.step(s, c)
                if t is None:
                    return (c,) + extend(m, left - 1)
                if left > 1:
                    rest = search(t, succ(m), left - 1)
                    if rest is not None:
                        return (c,) + rest
            failed.add(key)
            return None

        return search(o.start(), np.ones(V, dtype=bool), k) if V else None

    # -- soundness and counts -------------------------------------------------

    def census(self, n: int, k: int) -> dict | None:
        """Exact strip and target word counts, plus the first missing target word.

        Runs the subset construction of the strip paired with the oracle;
        words reaching the same pair are counted together. Returns ``None``
        when a layer holds more than ``pair_budget`` pairs.
        """
        o = self.oracle
        g, masks, indptr = self._arrays(n)
        A = len(masks)
        members = [np.flatnonzero(m) for m in masks]
        lab = projected_labels(g, self.factor)

        def succ(vs: np.ndarray) -> np.ndarray:
            if len(vs) == 0:
                return vs
            lo, hi = indptr[vs], indptr[vs + 1]
            cnt = hi - lo
            total = int(cnt.sum())
            if total == 0:
                return vs[:0]
            if total > len(g) // 16:
                # dense frontier: scatter into a mask instead of sorting
                y = np.zeros(len(g), dtype=bool)
                x = np.zeros(len(g), dtype=bool)
                x[vs] = True
                y[g.dst[x[g.src]]] = True
                return np.flatnonzero(y)
            off = np.repeat(lo - (np.cumsum(cnt) - cnt), cnt)
            return np.unique(g.dst[np.arange(total) + off])

        # pair key -> (oracle state, vertex array, word count, a representative word)
        layer: dict = {}
        s0 = o.start()
        for c in range(A):
            t = o.step(s0, c)
            t = DEAD if t is None else t
            vs = members[c]
            if t == DEAD and len(vs) == 0:
                continue
            layer[(t, vs.tobytes())] = (t, vs, 1, (c,))
        for _ in range(k - 1):
            nxt: dict = {}
            split: dict[bytes, list] = {}  # many pairs share a vertex set
            for (_, vkey), (t, vs, count, word) in layer.items():
                if vkey not in split:
                    ys = succ(vs)
                    ylab = lab[ys]
                    split[vkey] = [ys[ylab == c] for c in range(A)]
                for c in range(A):
                    u = DEAD if t == DEAD else o.step(t, c)
                    u = DEAD if u is None else u
                    ws = split[vkey][c]
                    if u == DEAD and len(ws) == 0:
                        continue
                    key = (u, ws.tobytes())
                    if key in nxt:
                        pu, pv, pc, pw = nxt[key]
                        nxt[key] = (pu, pv, pc + count, min(pw, word + (c,)))
                    else:
                        nxt[key] = (u, ws, count, word + (c,))
            if len(nxt) > self.pair_budget:
                return None
            layer = nxt
        strip_size = sum(c for t, vs, c, _ in layer.values() if len(vs))
        target_size = sum(c for t, vs, c, _ in layer.values() if t != DEAD)
        missing = [w for t, vs, c, w in layer.values() if t != DEAD and len(vs) == 0]
        return {
            "strip": strip_size,
            "target": target_size,
            "missing": min(missing) if missing else None,
            "bad": sum(c for t, vs, c, _ in layer.values() if t == DEAD),
        }

    def check_sound(self, n: int, k: int) -> str:
        """``verified`` or ``unverified``; raises ``NotARealization`` on a missing word."""
        info = self.census(n, k)
        if info is None:
            return "unverified"
        if info["missing"] is not None:
            w = info["missing"]
            raise NotARealization(w, n, self.factor.target.render(w))
        return "verified"

    # -- measurement ---------------------------------------------------------

    def measure(self, k: int, n_budget: int, *, n_start: int = 0, soundness: bool = True) -> Measurement:
        if self.oracle is None:
            raise ValueError("an oracle is required to measure phi")
        if k < 1:
            raise ValueError("k must be positive")
        t0 = time.perf_counter()
        n = n_start
        found = None
        while n <= n_budget:
            try:
                bad = self.has_bad_word(n, k)
            except BudgetExceeded as exc:
                witness = self.smallest_bad_word(n - 1, k) if n > n_start else ()
                ex = Exceeded(k, n - 1, witness or (), self.factor.target.render(witness or ()),
                              self.oracle.metadata.get("truncation"), f"vertex budget: {exc}")
                return self._exceeded(k, ex, t0)
            if not bad:
                found = n
                break
            n += 1
        if found is None:
            witness = self.smallest_bad_word(n_budget, k) or ()
            ex = Exceeded(k, n_budget, witness, self.factor.target.render(witness),
                          self.oracle.metadata.get("truncation"))
            return self._exceeded(k, ex, t0)
        status, sizes = "ok", (None, None)
        sound = "unchecked"
        if soundness:
            info = self.census(found, k)
            if info is None:
                sound = "unverified"
            else:
                if info["missing"] is not None:
                    w = info["missing"]
                    raise NotARealization(w, found, self.factor.target.render(w))
                sound = "verified"
                sizes = (info["strip"], info["target"])
        if sound == "unverified":
            status = "ok-unverified"
        ms = (time.perf_counter() - t0) * 1000
        return Measurement(k, found, sizes[0], sizes[1], ms, status, len(self.graph(found)), sound)

    def _exceeded(self, k: int, ex: Exceeded, t0: float) -> Measurement:
        ms = (time.perf_counter() - t0) * 1000
        return Measurement(k, None, None, None, ms, "exceeded", 0, "unchecked", ex)


def measure_phi(
    sft: SftDef,
    factor: FactorMap,
    oracle: EffectiveOracle,
    k: int,
    n_budget: int,
    *,
    max_vertices: int | None = None,
    soundness: bool = True,
) -> int | Exceeded:
    """Smallest strip half-width whose length-``k`` language matches the oracle."""
    m = SpeedMeter(sft, factor, oracle, max_vertices=max_vertices).measure(k, n_budget, soundness=soundness)
    return m.n if m.exceeded is None else m.exceeded


def envelope_bound(sft: SftDef, phi_value: int) -> int:
    """Vertex bound ``|B| ** (r * (2 phi + 1) ** (d-1))`` with ``r`` the pattern width in columns.

    A strip of half-width ``phi`` has ``2 phi + 1`` rows and a vertex is an
    ``r``-column window of it.
    """
    r = max((p.extent(0) for p in sft.forbidden), default=1)
    return sft.alphabet.size ** (r * (2 * phi_value + 1) ** (sft.dimension - 1))


# ---------------------------------------------------------------------------
# profiles

CSV_COLUMNS = ("k", "n", "strip_lang_size", "target_lang_size", "wall_ms", "status")


@dataclass
class SpeedProfile:
    entries: list[Measurement]
    budget_exceeded_at: int | None = None
    kind: str = "exact"
    meta: dict = field(default_factory=dict)

    def phi(self) -> dict[int, int]:
        return {e.k: e.n for e in self.entries if e.n is not None}

    def to_csv(self, timings: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for e in self.entries:
            w.writerow([
                e.k,
                "" if e.n is None else e.n,
                "" if e.strip_lang_size is None else e.strip_lang_size,
                "" if e.target_lang_size is None else e.target_lang_size,
                f"{e.wall_ms:.1f}" if timings else "",
                e.status,
            ])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SpeedProfile":
        rows = list(csv.DictReader(io.StringIO(text)))
        entries = []
        exceeded = None
        for r in rows:
            def num(key):
                return int(r[key]) if r[key] not in ("", None) else None
            e = Measurement(int(r["k"]), num("n"), num("strip_lang_size"), num("target_lang_size"),
                            float(r["wall_ms"] or 0), r["status"])
            if e.status == "exceeded" and exceeded is None:
                exceeded = e.k
            entries.append(e)
        kind = "heuristic" if any(e.status == "heuristic" for e in entries) else "exact"
        return cls(entries, exceeded, kind)


def profile(
    sft: SftDef,
    factor: FactorMap,
    oracle: EffectiveOracle | None,
    k_max: int,
    n_budget: int,
    *,
    k_min: int = 1,
    max_vertices: int | None = None,
    threads: int = 1,
    soundness: bool = True,
    window: int = 3,
) -> SpeedProfile:
    """phi(k) for ``k_min..k_max``; stops at the first exceeded budget.

    Without an oracle the profile is a stabilization heuristic instead (see
    ``stabilization_width``) and is labelled as such.
    """
    if oracle is None:
        meter = SpeedMeter(sft, factor, None, max_vertices=max_vertices)
        entries = []
        for k in range(k_min, k_max + 1):
            entries.append(stabilization_width(meter, k, n_budget, window))
            if entries[-1].n is None:
                return SpeedProfile(entries, k, "heuristic", {"window": window})
        return SpeedProfile(entries, None, "heuristic", {"window": window})
    meter = SpeedMeter(sft, factor, oracle, max_vertices=max_vertices)
    meta = dict(oracle.metadata)
    ks = list(range(k_min, k_max + 1))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda k: meter.measure(k, n_budget, soundness=soundness), ks))
        entries = []
        for m in results:
            entries.append(m)
            if m.exceeded is not None:
                return SpeedProfile(entries, m.k, "exact", meta)
        return SpeedProfile(entries, None, "exact", meta)
    entries = []
    n0 = 0
    for k in ks:
        # phi is non-decreasing in k, so the previous value is a safe start
        m = meter.measure(k, n_budget, n_start=n0, soundness=soundness)
        entries.append(m)
        if m.exceeded is not None:
            return SpeedProfile(entries, k, "exact", meta)
        n0 = m.n
    return SpeedProfile(entries, None, "exact", meta)


def stabilization_width(meter: SpeedMeter, k: int, n_budget: int, window: int = 3) -> Measurement:
    """Smallest ``n`` whose strip language stays unchanged for ``window`` consecutive widths (heuristic)."""
    t0 = time.perf_counter()
    langs = []
    for n in range(n_budget + 1):
        try:
            langs.append(strip_language(meter.graph(n), meter.factor, k, max_words=DEFAULT_MAX_LANGUAGE).words)
        except BudgetExceeded:
            break
        if len(langs) >= window and all(l == langs[-1] for l in langs[-window:]):
            m = n - window + 1
            ms = (time.perf_counter() - t0) * 1000
            return Measurement(k, m, len(langs[m]), None, ms, "heuristic", len(meter.graph(m)))
    ms = (time.perf_counter() - t0) * 1000
    return Measurement(k, None, None, None, ms, "exceeded")


# ---------------------------------------------------------------------------
# preorder


@dataclass(frozen=True)
class PreorderVerdict:
    relation: str
    forward: tuple[int, int] | None
    backward: tuple[int, int] | None
    r_max: int
    M_max: int
    ks: tuple[int, ...]

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _dominated(p: dict[int, int], q: dict[int, int], r_max: int, M_max: int) -> tuple[int, int] | None:
    """Least ``(r, M)`` with ``p(k) <= M q(k + r)`` wherever both sides were measured."""
    for r in range(r_max + 1):
        ks = [k for k in p if k + r in q]
        if not ks:
            continue
        for M in range(1, M_max + 1):
            if all(p[k] <= M * q[k + r] for k in ks):
                return (r, M)
    return None


def compare_profiles(p: SpeedProfile, q: SpeedProfile, r_max: int = 2, M_max: int = 4) -> PreorderVerdict:
    """Bounded search for witnesses of ``p <= q`` and ``q <= p``."""
    if p.kind != "exact" or q.kind != "exact":
        raise ValueError("heuristic profiles cannot be compared")
    pp, qq = p.phi(), q.phi()
    common = tuple(sorted(set(pp) & set(qq)))
    if not common:
        raise ValueError("profiles share no measured k")
    fwd = _dominated(pp, qq, r_max, M_max)
    bwd = _dominated(qq, pp, r_max, M_max)
    if fwd and bwd:
        rel = "∼"
    elif fwd:
        rel = "≺"
    elif bwd:
        rel = "≻"
    else:
        rel = "incomparable-at-budget"
    return PreorderVerdict(rel, fwd, bwd, r_max, M_max, common)


# ---------------------------------------------------------------------------
# semi-decision


@dataclass
class NonMembership:
    word: tuple[int, ...]
    excluded_at: int | None
    explored: dict[int, int]
    status: str


def decide_nonmembership(
    sft: SftDef,
    factor: FactorMap,
    u: Sequence[int] | str,
    m_budget: int,
    *,
    max_vertices: int | None = None,
) -> NonMembership:
    """Widen the strip until ``u`` is no longer readable on row 0.

    ``still-alive`` after ``m_budget`` says nothing about membership.
    """
    if isinstance(u, str):
        u = factor.target.parse(u)
    u = tuple(u)
    meter = SpeedMeter(sft, factor, None, max_vertices=max_vertices)
    explored: dict[int, int] = {}
    for m in range(m_budget + 1):
        try:
            g = meter.graph(m)
        except BudgetExceeded:
            break
        explored[m] = len(g)
        if not _reads(g, factor, u):
            return NonMembership(u, m, explored, "excluded")
    return NonMembership(u, None, explored, "still-alive")


def _reads(g: StripGraph, factor: FactorMap, word: Sequence[int]) -> bool:
    lab = projected_labels(g, factor)
    x = lab == word[0] if word else np.ones(len(g), dtype=bool)
    for c in word[1:]:
        y = np.zeros(len(g), dtype=bool)
        y[g.dst[x[g.src]]] = True
        x = y & (lab == c)
        if not x.any():
            return False
    return bool(x.any())
