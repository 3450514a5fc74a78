"""Speed of realizations of one-dimensional subshifts by two-dimensional SFTs."""

from .core import Alphabet, FactorMap, Pattern, SftDef, SftError
from .strip import BudgetExceeded, StripBuilder, build_strip, language_at
from .speed import SpeedMeter, SpeedProfile, measure_phi, profile

__version__ = "0.1.0"
