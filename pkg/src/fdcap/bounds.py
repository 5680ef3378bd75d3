"""Sandwich bounds on the capacity from a single value of delta_n."""

from __future__ import annotations

import math
from dataclasses import dataclass

from fdcap.errors import FdcapError
from fdcap.patterns import PatternSet, zero_params

# bracket ends are pushed outward by this much to absorb rounding
ROUND_SLACK = 1e-12


class BoundsError(FdcapError, ValueError):
    pass


@dataclass(frozen=True)
class CapacityBracket:
    """``lower <= cap <= upper`` in bits per symbol.

    ``raw_lower`` is the lower expression before clamping at zero; it can be
    negative for short lengths.
    """

    n: int
    delta_n: int
    lower: float
    upper: float
    raw_lower: float

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def _bracket(n: int, delta_n: int, shift: int, denom: int) -> CapacityBracket:
    if delta_n < 1:
        raise BoundsError("delta_n must be at least 1")
    if n < 1:
        raise BoundsError("n must be positive")
    log_delta = math.log2(delta_n)
    raw = (log_delta - shift) / denom
    lower = max(0.0, raw - ROUND_SLACK)
    upper = min(1.0, log_delta / n + ROUND_SLACK)
    return CapacityBracket(n, delta_n, lower, upper, raw)


def theorem1_bracket(n: int, delta_n: int, d: PatternSet) -> CapacityBracket:
    """Bracket valid for any forbidden set once ``n >= r1 + r2``."""
    r, r1, r2 = zero_params(d)
    if n < r1 + r2:
        raise BoundsError(f"n={n} is below r1+r2={r1 + r2}")
    return _bracket(n, delta_n, r1 + r2, n + r + 1 - (r1 + r2))


def corollary2_bracket(n: int, delta_n: int, d: PatternSet) -> CapacityBracket:
    """Specialised bracket for sets without zeros, or without boundary zeros.

    Without zeros the lower side is ``log2(delta_n)/(n+1)``; when no pattern
    starts or ends with a zero it is ``log2(delta_n)/(n+r+1)``.
    """
    r, r1, r2 = zero_params(d)
    if not d.has_zeros():
        return _bracket(n, delta_n, 0, n + 1)
    if r1 == 0 and r2 == 0:
        return _bracket(n, delta_n, 0, n + r + 1)
    raise BoundsError("some pattern starts or ends with a zero; use theorem1_bracket")


def zero_capacity_code_bound(d: PatternSet) -> int:
    """Upper bound on delta_n for every n when the capacity is zero."""
    _, r1, r2 = zero_params(d)
    return 2 ** (r1 + r2)


def positive_floor(d: PatternSet) -> float:
    """A lower bound ``1/(2M+m)`` on the capacity, valid once it is known to be positive."""
    return 1.0 / (2 * d.M + d.m)


def n_for_accuracy(d: PatternSet, eps: float) -> int:
    """Smallest n for which the bracket from delta_n is guaranteed narrower than ``eps``."""
    if eps <= 0:
        raise BoundsError("eps must be positive")
    r, r1, r2 = zero_params(d)
    need = max(r1 + r2, r + 1)
    n = max(1, math.ceil(need / eps))
    # guard against ceil landing one step high through float error
    while n > 1 and need / (n - 1) <= eps:
        n -= 1
    return n
