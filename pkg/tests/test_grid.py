from __future__ import annotations

import pytest

from subshift_speed.constructions import Patch, check_pattern_free
from subshift_speed.constructions.grid import (
    GRID,
    GridLetter,
    check_grid_doubling,
    grid_layer_sft,
    grid_rule_families,
)


def patch(rows: list[str]) -> Patch:
    """Rows given top first, letters separated by blanks."""
    return Patch.from_text(GRID, "\n".join(rows))


def test_letters():
    assert GRID.letters == ("R", "R*", "B", "B*")
    assert GridLetter.parse("B*") == GridLetter("blue", True)
    assert GridLetter("red").name == "R"
    with pytest.raises(ValueError):
        GridLetter.parse("G")
    with pytest.raises(ValueError):
        GridLetter("green")


def test_family_sizes():
    fam = grid_rule_families()
    assert {k: len(v) for k, v in fam.items()} == {"F1": 8, "F2": 4, "F3": 8, "F4": 4, "F5": 4}
    assert len(grid_layer_sft().forbidden) == 28


def test_all_red_is_admissible():
    assert check_pattern_free(patch(["R R R R"] * 4), grid_layer_sft()) == []
    assert check_pattern_free(patch(["R R R R", "R* R* R* R*", "R R R R"]), grid_layer_sft()) == []


def test_hand_checked_doubling():
    # alternating row, a starred row above it, then runs of two
    ok = patch(["R R B B R R", "R* B* R* B* R* B*", "R B R B R B"])
    assert check_pattern_free(ok, grid_layer_sft()) == []


@pytest.mark.parametrize(
    "rows",
    [
        ["R R* R"],  # partial star
        ["B", "R"],  # colour change without a star below
        ["R B", "R* R*"],  # monochromatic star row splits
        ["R B", "R* B*"],  # red|blue boundary must merge
        ["B B", "B* R*"],  # blue|red boundary must stay
    ],
)
def test_each_family_bites(rows):
    assert check_pattern_free(patch(rows), grid_layer_sft()) != []


@pytest.mark.parametrize("runs", range(0, 5))
def test_doubling_through_starred_rows(runs):
    r = check_grid_doubling(2 * runs + 1, runs)
    assert r.ok
    assert r.top_run == 2**runs
    assert r.render().endswith(f"doubling OK, top run length {2**runs}")
    assert r.star_rows == tuple(range(1, 2 * runs, 2))


def test_doubling_with_spare_rows():
    r = check_grid_doubling(7, 2)
    assert r.ok and r.expected[6] == 4 and r.expected[4] == 4


def test_bad_heights():
    with pytest.raises(ValueError):
        check_grid_doubling(4, 1)
    with pytest.raises(ValueError):
        check_grid_doubling(3, 2)
    with pytest.raises(ValueError):
        check_grid_doubling(3, -1)
