from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brute import extendable_language
from subshift_speed.constructions import build_example_21
from subshift_speed.core import Alphabet, FactorMap, Pattern, SftDef
from subshift_speed.strip import (
    BUDGET_ENV,
    LanguageSet,
    StripBudgetExceeded,
    StripBuilder,
    accepts,
    build_strip,
    language_at,
    strip_language,
    trim_essential,
)
from test_core import small_sfts


def test_example_vertex_counts():
    sft, _, _ = build_example_21()
    b = StripBuilder(sft)
    # frozen from the direct enumeration route below
    assert [len(b.graph(n)) for n in range(4)] == [3, 17, 99, 577]


@pytest.mark.parametrize("n", [0, 1])
def test_incremental_matches_direct_on_example(n):
    sft, _, _ = build_example_21()
    inc = trim_essential(build_strip(sft, n))
    direct = trim_essential(build_strip(sft, n, method="direct"))
    assert inc.signature() == direct.signature()


@given(small_sfts(), st.integers(0, 1))
def test_incremental_matches_direct_random(sft, n):
    inc = trim_essential(build_strip(sft, n))
    direct = trim_essential(build_strip(sft, n, method="direct"))
    assert inc.signature() == direct.signature()


@given(small_sfts(), st.integers(0, 1), st.integers(1, 4))
def test_language_matches_brute_force(sft, n, k):
    ident = FactorMap.identity(sft.alphabet)
    assert set(language_at(sft, ident, n, k).words) == extendable_language(sft, ident, n, k)


@given(small_sfts(2), st.integers(1, 4))
def test_language_shrinks_with_width(sft, k):
    ident = FactorMap.identity(sft.alphabet)
    assert language_at(sft, ident, 1, k).words <= language_at(sft, ident, 0, k).words


def test_trimmed_graph_has_no_sources_or_sinks():
    sft, _, _ = build_example_21()
    g = StripBuilder(sft).graph(2)
    assert set(g.src.tolist()) == set(range(len(g))) == set(g.dst.tolist())


def test_empty_strip_when_no_configuration_fits():
    a = Alphabet(("0",))
    sft = SftDef(2, a, (Pattern((((0, 0), 0),)),))
    g = StripBuilder(sft).graph(1)
    assert len(g) == 0
    assert len(strip_language(g, FactorMap.identity(a), 3)) == 0


def test_accepts_agrees_with_language():
    sft, factor, _ = build_example_21()
    g = StripBuilder(sft).graph(1)
    lang = strip_language(g, factor, 4)
    for w in [(0, 0, 1, 1), (2, 0, 1, 1), (0, 1, 0, 1), (2, 1, 2, 2)]:
        assert accepts(g, factor, w) == (w in lang.words)


def test_vertex_budget_from_environment(monkeypatch):
    sft, _, _ = build_example_21()
    monkeypatch.setenv(BUDGET_ENV, "20")
    StripBuilder(sft).graph(1)
    with pytest.raises(StripBudgetExceeded) as info:
        StripBuilder(sft).graph(2)
    assert info.value.budget == 20
    with pytest.raises(StripBudgetExceeded):
        build_strip(sft, 2, method="direct")


def test_language_set_checks_lengths():
    a = Alphabet(("0", "1"))
    with pytest.raises(ValueError):
        LanguageSet(2, a, frozenset({(0,)}))
    ls = LanguageSet(2, a, frozenset({(1, 0), (0, 1)}))
    assert ls.to_text() == "01\n10\n"
    assert "10" in ls


def test_graph_labels_are_central_letters():
    sft, _, _ = build_example_21()
    g = StripBuilder(sft).graph(1)
    assert np.array_equal(g.labels, g.cells[:, 1, g.r - 1])
    doc = g.to_dict()
    assert len(doc["vertices"]) == len(g) and len(doc["adjacency"]) == len(g)


def test_negative_width_rejected():
    sft, _, _ = build_example_21()
    with pytest.raises(ValueError):
        build_strip(sft, -1)
