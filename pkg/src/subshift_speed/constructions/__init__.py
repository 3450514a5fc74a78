"""Explicit tilesets, fixtures and generators."""

from .patches import Patch, Violation, check_pattern_free, complement_rules, occurring_patterns
from .examples import (
    build_counter_tileset,
    build_example_21,
    build_palindrome_tileset,
    counter_configuration,
    four_triangles_patch,
    mismatched_strip_patch,
    counter_patch,
    mirror_patch,
    mirror_configuration,
    triangle_configuration,
)
from .grid import GRID, GridLetter, check_grid_doubling, grid_layer_sft, grid_rule_families
from .hilbert import TILES, HilbertTile, check_hilbert_path, hilbert_substitution
from .compiler import (
    AlphabetBudgetExceeded,
    LayeredAlphabet,
    LayeredConfig,
    QuickRealization,
    compile_quick_realization,
    fixture_mutations,
    fold_tapes,
    quick_fixture,
)
