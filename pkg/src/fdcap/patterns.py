"""Forbidden difference patterns and the word algebra around them.

Words are plain strings. Binary words use ``"01"``; difference words use
``"-0+"``. Extended patterns may also contain ``"x"``, which stands for
the symbol ``±`` (either ``+`` or ``-`` at that position).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable

from fdcap.errors import BudgetExhausted, PatternError

MINUS = "-"
ZERO = "0"
PLUS = "+"
PM = "x"

DIFF_ALPHABET = (MINUS, ZERO, PLUS)
PATTERN_ALPHABET = DIFF_ALPHABET + (PM,)

_NEGATE = str.maketrans({PLUS: MINUS, MINUS: PLUS})
_PM_ALIASES = {"±": PM, "X": PM}


def negate(word: str) -> str:
    """Swap ``+`` and ``-``; ``0`` and ``x`` are fixed."""
    return word.translate(_NEGATE)


def _runs_of_zeros(pattern: str) -> tuple[int, int, int]:
    longest = max((len(run) for run in re.findall("0+", pattern)), default=0)
    prefix = len(pattern) - len(pattern.lstrip(ZERO))
    suffix = len(pattern) - len(pattern.rstrip(ZERO))
    return longest, prefix, suffix


@dataclass(frozen=True)
class PatternSet:
    """An immutable set of forbidden difference patterns.

    Patterns are stored sorted and deduplicated, so two sets with the same
    members compare equal. ``m`` is the longest pattern length, ``M`` the
    total number of symbols, ``r`` the longest run of zeros inside any
    pattern, and ``r1``/``r2`` the longest all-zero prefix/suffix.
    """

    patterns: tuple[str, ...]
    m: int = field(init=False)
    M: int = field(init=False)
    r: int = field(init=False)
    r1: int = field(init=False)
    r2: int = field(init=False)
    extended: bool = field(init=False)

    def __init__(self, patterns: Iterable[str]):
        pats = tuple(sorted(set(patterns), key=lambda p: (len(p), p)))
        if not pats:
            raise PatternError("pattern set is empty")
        for p in pats:
            if not p:
                raise PatternError("empty pattern")
            bad = set(p) - set(PATTERN_ALPHABET)
            if bad:
                raise PatternError(f"illegal symbol(s) {sorted(bad)!r} in pattern {p!r}")
        object.__setattr__(self, "patterns", pats)
        object.__setattr__(self, "m", max(len(p) for p in pats))
        object.__setattr__(self, "M", sum(len(p) for p in pats))
        r, r1, r2 = zero_params(pats)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "r1", r1)
        object.__setattr__(self, "r2", r2)
        object.__setattr__(self, "extended", any(PM in p for p in pats))

    def __iter__(self):
        return iter(self.patterns)

    def __len__(self) -> int:
        return len(self.patterns)

    def __contains__(self, pattern: object) -> bool:
        return pattern in self.patterns

    def symmetric(self) -> PatternSet:
        """The set ``D ∪ -D``."""
        return PatternSet(self.patterns + tuple(negate(p) for p in self.patterns))

    def has_all_zero_pattern(self) -> bool:
        return any(set(p) == {ZERO} for p in self.patterns)

    def has_zeros(self) -> bool:
        return any(ZERO in p for p in self.patterns)

    def to_text(self) -> str:
        return "".join(p + "\n" for p in self.patterns)

    def params(self) -> dict[str, int]:
        return {"m": self.m, "M": self.M, "r": self.r, "r1": self.r1, "r2": self.r2}

    def __str__(self) -> str:
        return "{" + ", ".join(self.patterns) + "}"


def parse_pattern_set(text: str) -> PatternSet:
    """Parse the line-oriented pattern format.

    One pattern per line over ``+ - 0 x`` (``±`` is accepted for ``x``).
    Blank lines and everything after ``#`` are ignored.

    >>> parse_pattern_set("0++").params()
    {'m': 3, 'M': 3, 'r': 1, 'r1': 1, 'r2': 0}
    """
    patterns = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for alias, sym in _PM_ALIASES.items():
            line = line.replace(alias, sym)
        bad = set(line) - set(PATTERN_ALPHABET)
        if bad:
            raise PatternError(f"line {lineno}: illegal character(s) {sorted(bad)!r}")
        patterns.append(line)
    if not patterns:
        raise PatternError("no patterns found")
    return PatternSet(patterns)


def negate_set(d: PatternSet) -> PatternSet:
    return PatternSet(negate(p) for p in d)


def expand_pattern(pattern: str) -> list[str]:
    slots = [(PLUS, MINUS) if s == PM else (s,) for s in pattern]
    return ["".join(choice) for choice in itertools.product(*slots)]


def expand_extended(d: PatternSet, budget: int | None = None) -> PatternSet:
    """Replace every ``x`` by both ``+`` and ``-``.

    A pattern with k ``x`` symbols yields 2**k plain patterns. ``budget``
    bounds the number of generated patterns before deduplication.
    """
    if not d.extended:
        return d
    if budget is not None:
        total = sum(2 ** p.count(PM) for p in d)
        if total > budget:
            raise BudgetExhausted(f"expansion yields {total} patterns, budget is {budget}")
    return PatternSet(q for p in d for q in expand_pattern(p))


def difference(u: str, v: str) -> str:
    """Symbol-wise ``u - v`` of two binary words."""
    if len(u) != len(v):
        raise ValueError(f"length mismatch: {len(u)} != {len(v)}")
    out = []
    for a, b in zip(u, v):
        if a not in "01" or b not in "01":
            raise ValueError("binary words must be over '01'")
        out.append(ZERO if a == b else (PLUS if a == "1" else MINUS))
    return "".join(out)


def avoids(word: str, d: PatternSet | Iterable[str]) -> bool:
    """True iff no pattern of ``d`` occurs as a contiguous subword of ``word``."""
    pats = d.patterns if isinstance(d, PatternSet) else tuple(d)
    if any(PM in p for p in pats):
        raise PatternError("avoids() needs a plain pattern set; call expand_extended first")
    return not any(p in word for p in pats)


def zero_params(d: PatternSet | Iterable[str]) -> tuple[int, int, int]:
    """Return ``(r, r1, r2)``: longest zero run, zero prefix and zero suffix."""
    pats = d.patterns if isinstance(d, PatternSet) else tuple(d)
    runs = [_runs_of_zeros(p) for p in pats]
    return (
        max((x[0] for x in runs), default=0),
        max((x[1] for x in runs), default=0),
        max((x[2] for x in runs), default=0),
    )
