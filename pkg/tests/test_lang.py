from __future__ import annotations

import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from brute import block_equal_words
from subshift_speed.core import Alphabet
from subshift_speed.lang import (
    APPROX_LABEL,
    ORACLES,
    BlockEqualOracle,
    EqualBlocksOracle,
    FullShiftOracle,
    GoldenMeanOracle,
    PalindromeOracle,
    ProductOracle,
    TruncatedListOracle,
    brute_follower_count,
    check_follower_bound,
    follower_sets,
    get_oracle,
    oracle_language,
)

BIN = Alphabet(("0", "1"))


def fib(n: int) -> int:
    a, b = 1, 2
    for _ in range(n - 1):
        a, b = b, a + b
    return a


@pytest.mark.parametrize("k", range(1, 11))
def test_golden_counts_are_fibonacci(k):
    assert len(oracle_language(GoldenMeanOracle(), k)) == fib(k + 1)


def test_full_shift_counts():
    assert [len(oracle_language(FullShiftOracle(BIN), k)) for k in range(1, 6)] == [2, 4, 8, 16, 32]


@pytest.mark.parametrize("k", range(1, 7))
def test_block_equal_matches_concatenations(k):
    words = set(oracle_language(BlockEqualOracle(), k).rendered())
    assert words == block_equal_words(k)


def test_block_equal_examples():
    o = BlockEqualOracle()
    for w in ("$aabb$", "abab", "aabbab", "$ab$", "bbb", "aaa"):
        assert o.contains(w), w
    for w in ("$b", "a$", "$aabbb$", "$aab$", "$abb$", "$aabbb"):
        assert not o.contains(w), w


def test_equal_blocks_and_palindromes():
    t = EqualBlocksOracle()
    assert t.contains("$aabb$") and t.contains("$$") and not t.contains("$aab$")
    assert t.contains("bbb$ab")  # truncated segments are free
    p = PalindromeOracle()
    assert p.contains("$0110$") and p.contains("$$") and not p.contains("$010$")
    assert p.contains("0101")


def _brute_palin(word: str) -> bool:
    parts = word.split("$")
    return all(len(s) % 2 == 0 and s == s[::-1] for s in parts[1:-1])


@given(st.text(alphabet="01$", min_size=1, max_size=9))
def test_palindrome_oracle_matches_segment_rule(word):
    assert PalindromeOracle().contains(word) == _brute_palin(word)


def _brute_avoiding(words: list[str], k: int, pad: int = 6) -> set[str]:
    out = set()
    for w in itertools.product("01", repeat=k + 2 * pad):
        s = "".join(w)
        if not any(f in s for f in words):
            out.add(s[pad : pad + k])
    return out


@pytest.mark.parametrize("forbidden", [["11"], ["00", "111"], ["010"], ["1", "00"]])
def test_truncated_list_language(forbidden):
    o = TruncatedListOracle(BIN, [BIN.parse(w) for w in forbidden])
    for k in (1, 3, 5):
        assert set(oracle_language(o, k).rendered()) == _brute_avoiding(forbidden, k)


def test_truncated_list_metadata():
    o = TruncatedListOracle.from_text(BIN, "11\n\n000\n", truncation=2)
    assert o.metadata == {"oracle": "truncated", "kind": "forbidden-word-list", "K": 2, "label": APPROX_LABEL}
    assert not o.exact
    with pytest.raises(ValueError):
        TruncatedListOracle(BIN, [()])


def test_product_oracle():
    g = GoldenMeanOracle()
    t = TruncatedListOracle(BIN, [BIN.parse("00")])
    both = ProductOracle(g, t, "and")
    either = ProductOracle(g, t, "or")
    for w in ("0101", "0010", "0110", "1010"):
        assert both.contains(w) == (g.contains(w) and t.contains(w))
        assert either.contains(w) == (g.contains(w) or t.contains(w))
    assert both.kind == t.kind
    with pytest.raises(ValueError):
        ProductOracle(g, BlockEqualOracle())


@pytest.mark.parametrize("name", sorted(ORACLES))
@pytest.mark.parametrize("k1,k2", [(1, 1), (2, 2), (3, 2)])
def test_follower_classes_match_brute_force(name, k1, k2):
    o = get_oracle(name)
    assert follower_sets(o, k1, k2).class_count == brute_follower_count(o, k1, k2)


def test_follower_table_is_a_partition():
    o = BlockEqualOracle()
    t = follower_sets(o, 3, 3)
    words = [w for cls in t.classes for w in cls]
    assert sorted(words) == list(itertools.product(range(3), repeat=3))
    doc = t.to_dict()
    assert doc["class_count"] == t.class_count == len(doc["classes"])


def test_follower_bound_arithmetic():
    t = follower_sets(BlockEqualOracle(), 3, 3)
    r = check_follower_bound(t, 2)
    assert r.lhs_bits == pytest.approx(math.log2(t.class_count))
    assert r.min_M == math.ceil(math.log2(t.class_count) / 2)
    assert r.holds
    assert not check_follower_bound(t, 0).holds
    assert check_follower_bound(t, 2, M=r.min_M).holds
    assert not check_follower_bound(t, 1, M=1).holds
    with pytest.raises(ValueError):
        check_follower_bound(t, 1, d=1)


def test_unknown_oracle():
    with pytest.raises(ValueError, match="unknown oracle"):
        get_oracle("nope")


def test_oracle_language_rejects_zero_length():
    with pytest.raises(ValueError):
        oracle_language(GoldenMeanOracle(), 0)
