"""Capacity of binary codes whose pairwise differences avoid forbidden patterns."""

from fdcap.patterns import (
    PatternSet,
    avoids,
    difference,
    expand_extended,
    negate,
    negate_set,
    parse_pattern_set,
    zero_params,
)

__version__ = "0.1.0"

__all__ = [
    "PatternSet",
    "avoids",
    "difference",
    "expand_extended",
    "negate",
    "negate_set",
    "parse_pattern_set",
    "zero_params",
    "__version__",
]
