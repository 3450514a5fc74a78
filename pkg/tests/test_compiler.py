from __future__ import annotations

import itertools

import pytest

from subshift_speed.constructions.compiler import (
    AlphabetBudgetExceeded,
    LayeredAlphabet,
    compile_quick_realization,
    fixture_mutations,
    fold_tapes,
    quick_fixture,
    unfold_config,
)
from subshift_speed.core import SftError
from subshift_speed.strip import BudgetExceeded
from subshift_speed.tm import GOLD, MachineConfig, TmBuilder, block_enumerator, golden_enumerator, step

ROW = ("0100100010" * 5)[:39]


@pytest.fixture(scope="module")
def golden():
    return compile_quick_realization(golden_enumerator(), "0")


@pytest.fixture(scope="module")
def fixture(golden):
    return quick_fixture(golden, ROW)


def tiny_machine():
    b = TmBuilder(1, ("#", "$", "0"), "tiny")
    b.add("q0", "#", "q1", "0", "R")
    b.add("q0", "0", "q0", "$", "L")
    b.add("q0", "$", "q1", "$", "S")
    b.add("q1", "*", "q0", "*", "L")
    return b.build("q0", ())


def leftward_machine():
    b = TmBuilder(1, GOLD, "leftward")
    b.add("q0", "*", "q1", "1", "L")
    b.add("q1", "*", "q2", "0", "L")
    b.add("q2", "*", "q3", "1", "R")
    b.add("q3", "*", "q4", "*", "R")
    b.add("q4", "*", "q5", "*", "R")
    b.add("q5", "*", "emit", "1", "R")
    b.add("emit", "*", "idle", "$", "S")
    b.add("idle", "*", "idle", "*", "S")
    return b.build("q0", (), emit=("emit",))


def test_layer_and_product_sizes(golden):
    s = golden.sizes()
    assert s["layers"] == {"Line": 5, "Config": 2, "Grid": 4, "Machine": 20, "Compar": 2}
    assert s["product"] == 1600 == golden.alphabet.size
    fam = s["families"]
    assert {k: fam[f"Grid.{k}"] for k in ("F1", "F2", "F3", "F4", "F5")} == {"F1": 8, "F2": 4, "F3": 8, "F4": 4, "F5": 4}
    assert fam["Comput"] == 21991680 and fam["Erase"] == 7296000
    assert s["comput"] == {"F1": 12160000, "F2": 0, "F3": 36480000, "F4": 12544000}


def test_layered_alphabet_indexing(golden):
    a = golden.alphabet
    for i in (0, 1, 799, 1599):
        assert a.index(a.letter(i)) == i
    with pytest.raises(IndexError):
        a.letter(1600)
    with pytest.raises(ValueError):
        LayeredAlphabet(("x",), ())


@pytest.mark.parametrize("name", ["Comput", "Erase"])
def test_machine_family_size_matches_enumeration(name):
    # the closed-form count against a direct pass over every window assignment
    real = compile_quick_realization(tiny_machine(), "0")
    fam = real.families[name]
    domains = [real.alphabet.layer(s[2]).letters for s in fam.slots]
    brute = sum(1 for v in itertools.product(*domains) if fam.forbidden(v))
    assert real.family_size(name) == brute > 0


def test_fixture_is_admissible(golden, fixture):
    assert golden.check(fixture) == []
    rows = golden.project(fixture)
    assert len(rows) == fixture.height and all(len(r) == fixture.width for r in rows)


def test_fixture_needs_a_long_enough_row(golden):
    with pytest.raises(ValueError):
        quick_fixture(golden, "01")


def test_each_mutation_trips_its_family(golden, fixture):
    muts = fixture_mutations(golden, fixture)
    assert len(muts) == 8
    for name, (cfg, family) in muts.items():
        assert family in golden.violated_families(cfg), name


def test_config_diagonal_rule(golden, fixture):
    assert golden.check(fixture, ["Config.diag"]) == []
    c = fixture.get("Config", 4, 4)
    bad = fixture.with_cell("Config", 4, 4, "1" if c == "0" else "0")
    assert {v.family for v in golden.check(bad, ["Config.diag"])} == {"Config.diag"}


def test_factor_reads_line_or_config(golden):
    f = golden.factor
    assert f.source.size == 1600
    assert f.target.letters == ("0", "1")


def folded_matches(m, steps):
    f = fold_tapes(m)
    a, b = MachineConfig.initial(m), step(MachineConfig.initial(f), f)
    for _ in range(steps):
        state, cells, heads = unfold_config(b, m.tapes)
        assert state == a.state
        assert cells == [{i: v for i, v in t.items() if v != "#"} for t in a.tapes]
        assert heads == a.heads
        assert all(h >= 0 for h in b.heads)
        if a.state in m.final:
            break
        a, b = step(a, m), step(b, f)
    return True


@pytest.mark.parametrize("make,steps", [(leftward_machine, 30), (golden_enumerator, 20), (tiny_machine, 30)])
def test_folding_preserves_runs(make, steps):
    assert folded_matches(make(), steps)


@pytest.mark.slow
def test_folding_block_enumerator():
    assert folded_matches(block_enumerator(), 400)


def test_folded_compile(golden):
    r = compile_quick_realization(leftward_machine(), "0", fold=True)
    assert r.source.name == "leftward"
    cfg = quick_fixture(r, ROW)
    assert r.check(cfg) == []


def test_multi_tape_rejected():
    b = TmBuilder(2, GOLD, "two")
    b.add("q", "**", "q", "**", "SS")
    m = b.build("q", ())
    with pytest.raises(SftError, match="single-tape"):
        compile_quick_realization(m, "0")
    with pytest.raises(SftError, match="single-tape"):
        compile_quick_realization(m, "0", fold=True)


def test_bad_periodic_word():
    with pytest.raises(SftError):
        compile_quick_realization(golden_enumerator(), "2")
    with pytest.raises(SftError):
        compile_quick_realization(golden_enumerator(), "")


def test_letter_budget():
    with pytest.raises(AlphabetBudgetExceeded) as info:
        compile_quick_realization(golden_enumerator(), "0", max_letters=10)
    assert isinstance(info.value, BudgetExceeded) and isinstance(info.value, SftError)


def test_to_dict_lists_small_families(golden):
    d = golden.to_dict()
    assert "Comput" not in d["families"]
    assert len(d["families"]["Init"]["patterns"]) == 19
    assert d["sizes"]["product"] == 1600
