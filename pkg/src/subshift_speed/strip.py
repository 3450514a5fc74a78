"""Width-n approximation strips as one-dimensional SFTs over columns.

A strip of half-width ``n`` is ``Z x [-n, n]``. Windows are stored as a
tuple of rows, bottom row (offset ``-n``) first, each row a tuple of
letter ids. A vertex is a window ``r`` columns wide and an edge is a
window ``r + 1`` columns wide whose two ``r``-column ends are its
endpoints.

The default construction grows the strip one row at a time. Restricting
a strip configuration to fewer rows gives a configuration of the shorter
strip, so every essential window of height ``h + 1`` restricts (bottom
and top) to essential windows of height ``h``. Candidates are generated
from the trimmed graph of the previous height and only patterns spanning
the full new height need checking.
"""

from __future__ import annotations

import itertools
import os
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .core import Alphabet, FactorMap, SftDef, require_valid

DEFAULT_MAX_VERTICES = 2_000_000
DEFAULT_MAX_LANGUAGE = 1_000_000
BUDGET_ENV = "SUBSHIFT_BUDGET_VERTICES"
CANDIDATE_BYTES = 1 << 30

Row = tuple[int, ...]
Window = tuple[Row, ...]


class BudgetExceeded(RuntimeError):
    """A configured size budget would be exceeded; carries the estimate."""

    def __init__(self, message: str, estimate: int, budget: int):
        super().__init__(f"{message}: estimate {estimate} > budget {budget}")
        self.estimate = estimate
        self.budget = budget


class StripBudgetExceeded(BudgetExceeded):
    pass


class LanguageBudgetExceeded(BudgetExceeded):
    pass


def vertex_budget(override: int | None = None) -> int:
    if override is not None:
        return override
    env = os.environ.get(BUDGET_ENV)
    return int(env) if env else DEFAULT_MAX_VERTICES


@dataclass(frozen=True)
class LanguageSet:
    k: int
    alphabet: Alphabet
    words: frozenset[tuple[int, ...]]
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self) -> None:
        if any(len(w) != self.k for w in self.words):
            raise ValueError("all words of a LanguageSet must have length k")

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word) -> bool:
        if isinstance(word, str):
            word = self.alphabet.parse(word)
        return tuple(word) in self.words

    def sorted_words(self) -> list[tuple[int, ...]]:
        return sorted(self.words)

    def rendered(self) -> list[str]:
        return [self.alphabet.render(w) for w in self.sorted_words()]

    def to_text(self) -> str:
        return "".join(w + "\n" for w in self.rendered())


# ---------------------------------------------------------------------------
# pattern compilation

_KEY_LIMIT = 1 << 62


@dataclass(frozen=True)
class _Shape:
    cells: tuple[tuple[int, int], ...]  # (dx, dy), normalized
    width: int  # dx span + 1
    words: frozenset[tuple[int, ...]]
    keys: np.ndarray | None = field(default=None, compare=False)  # sorted packed words


class CompiledRules:
    """Forbidden patterns normalized, deduplicated and grouped by shape."""

    def __init__(self, sft: SftDef):
        if sft.dimension != 2:
            raise ValueError("strips are implemented for dimension 2 only")
        require_valid(sft)
        self.alphabet = sft.alphabet
        self.base = sft.alphabet.size
        groups: dict[tuple[tuple[int, int], ...], set[tuple[int, ...]]] = defaultdict(set)
        for p in sft.forbidden:
            q = p.normalized()
            shape = tuple(c for c, _ in q.cells)
            groups[shape].add(tuple(a for _, a in q.cells))
        self.by_height: dict[int, list[_Shape]] = defaultdict(list)
        span = 0
        for shape, words in sorted(groups.items()):
            w = max(dx for dx, _ in shape) + 1
            h = max(dy for _, dy in shape)
            span = max(span, w - 1)
            keys = None
            if self.base ** len(shape) < _KEY_LIMIT:
                keys = np.array(sorted(self._pack(word) for word in words), dtype=np.int64)
            self.by_height[h].append(_Shape(shape, w, frozenset(words), keys))
        self.r = max(1, span)
        self.pattern_count = sum(len(s.words) for shapes in self.by_height.values() for s in shapes)

    def _pack(self, word: Sequence[int]) -> int:
        key, mult = 0, 1
        for a in word:
            key += a * mult
            mult *= self.base
        return key

    def window_clean(self, rows: Window, *, only_height: int | None = None) -> bool:
        """True if no pattern fits inside ``rows``; optionally only patterns of one y-span."""
        height = len(rows)
        width = len(rows[0])
        spans = [only_height] if only_height is not None else range(height)
        for h in spans:
            for s in self.by_height.get(h, ()):
                if s.width > width:
                    continue
                for oy in range(height - h):
                    for ox in range(width - s.width + 1):
                        if tuple(rows[oy + dy][ox + dx] for dx, dy in s.cells) in s.words:
                            return False
        return True

    def clean_mask(self, windows: np.ndarray, span: int) -> np.ndarray:
        """Vectorized ``window_clean`` restricted to patterns of y-span ``span``.

        ``windows`` has shape ``(N, height, width)``.
        """
        n, height, width = windows.shape
        ok = np.ones(n, dtype=bool)
        for s in self.by_height.get(span, ()):
            if s.width > width:
                continue
            for oy in range(height - span):
                for ox in range(width - s.width + 1):
                    if s.keys is not None:
                        key = np.zeros(n, dtype=np.int64)
                        mult = 1
                        for dx, dy in s.cells:
                            key += windows[:, oy + dy, ox + dx].astype(np.int64) * mult
                            mult *= self.base
                        pos = np.searchsorted(s.keys, key)
                        pos[pos == len(s.keys)] = 0
                        ok &= s.keys[pos] != key
                    else:
                        for i in np.flatnonzero(ok):
                            word = tuple(int(windows[i, oy + dy, ox + dx]) for dx, dy in s.cells)
                            if word in s.words:
                                ok[i] = False
        return ok


# ---------------------------------------------------------------------------
# array helpers


def _letter_dtype(size: int):
    if size <= 1 << 8:
        return np.uint8
    if size <= 1 << 16:
        return np.uint16
    return np.int32


def _row_ids(arr: np.ndarray, base: int) -> tuple[np.ndarray, np.ndarray]:
    """Unique rows of a 2-D integer array in lexicographic order, plus the inverse map."""
    arr = np.ascontiguousarray(arr)
    m = arr.shape[1]
    bits = max(1, int(base - 1).bit_length())
    if m * bits <= 62:
        key = np.zeros(len(arr), dtype=np.int64)
        for j in range(m):
            key = (key << bits) | arr[:, j].astype(np.int64)
        _, first, inv = np.unique(key, return_index=True, return_inverse=True)
        return arr[first], inv.reshape(-1)
    uniq, inv = np.unique(arr, axis=0, return_inverse=True)
    return uniq, inv.reshape(-1)


def _window_ids(windows: np.ndarray, base: int) -> tuple[np.ndarray, np.ndarray]:
    """Deduplicate ``(N, height, width)`` windows; returns (unique windows, inverse)."""
    n, h, w = windows.shape
    if n == 0:
        return windows.copy(), np.zeros(0, dtype=np.int64)
    bits = max(1, int(base - 1).bit_length())
    if h * w * bits <= 62 or h * bits > 62:
        flat = windows.transpose(0, 2, 1).reshape(n, w * h)
        uniq, inv = _row_ids(flat, base)
        return uniq.reshape(-1, w, h).transpose(0, 2, 1), inv
    # pack each column, then deduplicate tuples of column ids
    cols = windows.transpose(0, 2, 1).reshape(n * w, h)
    ucols, cinv = _row_ids(cols, base)
    ids = cinv.reshape(n, w)
    utup, inv = _row_ids(ids, max(2, len(ucols)))
    uniq = ucols[utup].transpose(0, 2, 1)
    return np.ascontiguousarray(uniq), inv


def _trim_mask(src: np.ndarray, dst: np.ndarray, m: int) -> np.ndarray:
    """Edges surviving iterated removal of vertices with in- or out-degree 0."""
    alive = np.ones(len(src), dtype=bool)
    while True:
        indeg = np.bincount(dst[alive], minlength=m)
        outdeg = np.bincount(src[alive], minlength=m)
        bad = (indeg == 0) | (outdeg == 0)
        nxt = alive & ~bad[src] & ~bad[dst]
        if nxt.sum() == alive.sum():
            return nxt
        alive = nxt


# ---------------------------------------------------------------------------
# graphs


@dataclass(frozen=True, eq=False)
class StripGraph:
    """Transfer graph of a strip.

    ``cells[v]`` is the window of vertex ``v`` with shape ``(2n+1, r)``;
    ``src``/``dst`` list the edges sorted by source then target.
    """

    n: int
    r: int
    alphabet: Alphabet
    cells: np.ndarray
    src: np.ndarray
    dst: np.ndarray
    trimmed: bool

    @property
    def height(self) -> int:
        return 2 * self.n + 1

    @property
    def edge_count(self) -> int:
        return len(self.src)

    def __len__(self) -> int:
        return len(self.cells)

    @cached_property
    def labels(self) -> np.ndarray:
        """Central letter of the last column of every vertex."""
        if len(self.cells) == 0:
            return np.zeros(0, dtype=np.int64)
        return self.cells[:, self.n, self.r - 1].astype(np.int64)

    def label(self, v: int) -> int:
        return int(self.labels[v])

    @cached_property
    def vertices(self) -> tuple[Window, ...]:
        return tuple(tuple(tuple(int(a) for a in row) for row in w) for w in self.cells)

    @cached_property
    def succ(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(len(self.cells))]
        for u, v in zip(self.src.tolist(), self.dst.tolist()):
            out[u].append(v)
        return tuple(tuple(s) for s in out)

    def edges(self) -> Iterable[tuple[int, int]]:
        return zip(self.src.tolist(), self.dst.tolist())

    def signature(self) -> tuple:
        """Hashable summary used to compare graphs in tests."""
        return (self.n, self.r, self.trimmed, self.vertices, self.succ)

    def to_dict(self) -> dict:
        names = self.alphabet.letters
        return {
            "n": self.n,
            "r": self.r,
            "trimmed": self.trimmed,
            "vertices": [[[names[a] for a in row] for row in v] for v in self.vertices],
            "adjacency": [list(s) for s in self.succ],
        }


def _graph_from_windows(
    edges: np.ndarray,
    n: int,
    r: int,
    alphabet: Alphabet,
    trimmed: bool,
    extra_vertices: np.ndarray | None = None,
) -> StripGraph:
    """Build a graph from ``(E, 2n+1, r+1)`` edge windows."""
    h = 2 * n + 1
    dtype = _letter_dtype(alphabet.size)
    e = len(edges)
    parts = [edges[:, :, :r], edges[:, :, 1:]]
    if extra_vertices is not None and len(extra_vertices):
        parts.append(extra_vertices)
    allv = np.concatenate(parts, axis=0) if e or extra_vertices is not None else np.zeros((0, h, r), dtype)
    if len(allv) == 0:
        empty = np.zeros(0, dtype=np.int64)
        return StripGraph(n, r, alphabet, np.zeros((0, h, r), dtype), empty, empty, trimmed)
    verts, inv = _window_ids(allv, alphabet.size)
    src, dst = inv[:e].astype(np.int64), inv[e : 2 * e].astype(np.int64)
    order = np.lexsort((dst, src))
    return StripGraph(n, r, alphabet, verts, src[order], dst[order], trimmed)


def trim_essential(g: StripGraph) -> StripGraph:
    """Delete vertices of in-degree 0 or out-degree 0 until none remain."""
    m = len(g)
    alive = _trim_mask(g.src, g.dst, m)
    keep = np.zeros(m, dtype=bool)
    keep[g.src[alive]] = True
    keep[g.dst[alive]] = True
    new = np.cumsum(keep) - 1
    return StripGraph(g.n, g.r, g.alphabet, g.cells[keep], new[g.src[alive]], new[g.dst[alive]], True)


class StripBuilder:
    """Grows trimmed strip edge sets row by row and caches every height."""

    def __init__(self, sft: SftDef, max_vertices: int | None = None):
        self.rules = CompiledRules(sft)
        self.r = self.rules.r
        self.alphabet = sft.alphabet
        self.max_vertices = vertex_budget(max_vertices)
        self.dtype = _letter_dtype(sft.alphabet.size)
        self._trimmed: dict[int, np.ndarray] = {}
        self.peak_candidates = 0
        self.peak_vertices = 0

    def _base(self) -> np.ndarray:
        a = self.alphabet.size
        width = self.r + 1
        if a**width > 50 * self.max_vertices:
            raise StripBudgetExceeded("strip budget exceeded at height 1", a**width, self.max_vertices)
        rows = np.array(list(itertools.product(range(a), repeat=width)), dtype=self.dtype).reshape(-1, 1, width)
        return rows[self.rules.clean_mask(rows, 0)]

    def candidates(self, height: int) -> np.ndarray:
        """Untrimmed edge windows at ``height``, grown from the trimmed ones a row lower."""
        if height < 1:
            raise ValueError("height must be positive")
        if height == 1:
            cands = self._base()
        else:
            prev = self.trimmed_edges(height - 1)
            e = len(prev)
            if e == 0:
                cands = np.zeros((0, height, self.r + 1), dtype=self.dtype)
            else:
                if height == 2:
                    ka = np.zeros(e, dtype=np.int64)
                    kb = ka
                else:
                    _, ids = _window_ids(np.concatenate([prev[:, 1:, :], prev[:, :-1, :]]), self.alphabet.size)
                    ka, kb = ids[:e], ids[e:]
                order = np.argsort(kb, kind="stable")
                kb_sorted = kb[order]
                lo = np.searchsorted(kb_sorted, ka, "left")
                hi = np.searchsorted(kb_sorted, ka, "right")
                counts = hi - lo
                total = int(counts.sum())
                # candidate windows are materialized, so cap their memory as well
                itemsize = np.dtype(self.dtype).itemsize
                cap = min(25 * self.max_vertices, CANDIDATE_BYTES // (height * (self.r + 1) * itemsize * 4))
                if total > cap:
                    raise StripBudgetExceeded(f"strip budget exceeded at height {height}", total, cap)
                a_idx = np.repeat(np.arange(e), counts)
                starts = np.repeat(lo - (np.cumsum(counts) - counts), counts)
                b_idx = order[np.arange(total) + starts]
                cands = np.concatenate([prev[a_idx], prev[b_idx][:, -1:, :]], axis=1)
                if self.rules.by_height.get(height - 1):
                    cands = cands[self.rules.clean_mask(cands, height - 1)]
        self.peak_candidates = max(self.peak_candidates, len(cands))
        return cands

    def trimmed_edges(self, height: int) -> np.ndarray:
        if height not in self._trimmed:
            cands = self.candidates(height)
            r = self.r
            if len(cands):
                verts, inv = _window_ids(np.concatenate([cands[:, :, :r], cands[:, :, 1:]]), self.alphabet.size)
                e = len(cands)
                alive = _trim_mask(inv[:e], inv[e:], len(verts))
                used = len(np.unique(inv[:e][alive]))
                self.peak_vertices = max(self.peak_vertices, used)
                if used > self.max_vertices:
                    raise StripBudgetExceeded(f"strip budget exceeded at height {height}", used, self.max_vertices)
                cands = cands[alive]
            self._trimmed[height] = cands
        return self._trimmed[height]

    def graph(self, n: int, *, trimmed: bool = True) -> StripGraph:
        if n < 0:
            raise ValueError("strip half-width must be non-negative")
        h = 2 * n + 1
        edges = self.trimmed_edges(h) if trimmed else self.candidates(h)
        return _graph_from_windows(edges, n, self.r, self.alphabet, trimmed)


def build_strip(sft: SftDef, n: int, *, method: str = "incremental", max_vertices: int | None = None) -> StripGraph:
    """Transfer graph of the half-width ``n`` strip, before the final trim.

    ``method="direct"`` enumerates every column of height ``2n+1`` with no
    intermediate pruning; it exists as an independent route for tests.
    """
    if n < 0:
        raise ValueError("strip half-width must be non-negative")
    if method == "incremental":
        return StripBuilder(sft, max_vertices).graph(n, trimmed=False)
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    rules = CompiledRules(sft)
    r, h, a = rules.r, 2 * n + 1, sft.alphabet.size
    budget = vertex_budget(max_vertices)
    estimate = a ** (h * r)
    if estimate > budget:
        raise StripBudgetExceeded("strip budget exceeded", estimate, budget)
    cols = list(itertools.product(range(a), repeat=h))

    def window(combo) -> Window:
        return tuple(tuple(c[y] for c in combo) for y in range(h))

    edges = [w for w in map(window, itertools.product(cols, repeat=r + 1)) if rules.window_clean(w)]
    verts = [w for w in map(window, itertools.product(cols, repeat=r)) if rules.window_clean(w)]
    dtype = _letter_dtype(a)
    e_arr = np.array(edges, dtype=dtype).reshape(len(edges), h, r + 1)
    v_arr = np.array(verts, dtype=dtype).reshape(len(verts), h, r)
    return _graph_from_windows(e_arr, n, r, sft.alphabet, False, extra_vertices=v_arr)


def strip_language(
    g: StripGraph,
    factor: FactorMap,
    k: int,
    *,
    max_words: int = DEFAULT_MAX_LANGUAGE,
) -> LanguageSet:
    """All length-``k`` label words of paths in a trimmed strip graph."""
    if not g.trimmed:
        raise ValueError("strip_language needs a trimmed graph")
    if k < 1:
        raise ValueError("k must be positive")
    table = factor.table
    labels = [table[c] for c in g.labels.tolist()]
    succ = g.succ
    start: dict[int, set[int]] = defaultdict(set)
    for v, c in enumerate(labels):
        start[c].add(v)
    frontier = {(c,): frozenset(vs) for c, vs in start.items()}
    for _ in range(k - 1):
        nxt: dict[tuple[int, ...], set[int]] = defaultdict(set)
        for word, states in frontier.items():
            for v in states:
                for w in succ[v]:
                    nxt[word + (labels[w],)].add(w)
        if len(nxt) > max_words:
            raise LanguageBudgetExceeded("language budget exceeded", len(nxt), max_words)
        frontier = {w: frozenset(s) for w, s in nxt.items()}
    return LanguageSet(k, factor.target, frozenset(frontier), {"n": g.n, "source": "strip"})


def projected_labels(g: StripGraph, factor: FactorMap) -> np.ndarray:
    return np.asarray(factor.table, dtype=np.int64)[g.labels] if len(g) else np.zeros(0, dtype=np.int64)


def accepts(g: StripGraph, factor: FactorMap, word: Sequence[int]) -> bool:
    """True if some path of the trimmed graph carries ``word``."""
    if len(word) == 0:
        return len(g) > 0
    labels = projected_labels(g, factor)
    states = labels == word[0]
    for c in word[1:]:
        nxt = np.zeros(len(g), dtype=bool)
        nxt[g.dst[states[g.src]]] = True
        states = nxt & (labels == c)
        if not states.any():
            return False
    return bool(states.any())


def language_at(sft: SftDef, factor: FactorMap, n: int, k: int, *, max_vertices: int | None = None) -> LanguageSet:
    """Convenience: build, trim and enumerate in one call."""
    g = StripBuilder(sft, max_vertices).graph(n)
    return strip_language(g, factor, k)
