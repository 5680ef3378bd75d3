"""Deciding whether a forbidden set has positive capacity.

The capacity is positive exactly when some word over ``{-,0,+}`` starts
with ``0^m``, ends with ``+0^(m-1)`` and avoids ``D ∪ -D``. Whether such a
word exists is a reachability question in the Aho-Corasick automaton of
``D ∪ -D ∪ {+0^(m-1)}`` once the states that signal a forbidden
occurrence are deleted.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from fdcap.errors import PatternError
from fdcap.patterns import DIFF_ALPHABET, PLUS, ZERO, PatternSet, expand_extended

DEFAULT_EXPANSION_BUDGET = 2**20


@dataclass(frozen=True)
class PatternAutomaton:
    """Aho-Corasick automaton over ``{-,0,+}``.

    ``states[i]`` is the label (a prefix of some pattern) of state ``i``;
    state 0 is the root. ``goto[i][a]`` is the state labelled by the
    longest suffix of ``states[i] + a`` that is a prefix of a pattern.
    ``accepting`` holds the states whose label ends with a pattern, i.e.
    the states in which an occurrence has just been completed.
    """

    states: tuple[str, ...]
    goto: tuple[dict[str, int], ...]
    accepting: frozenset[int]
    patterns: tuple[str, ...]
    removed: frozenset[int] = frozenset()

    def index(self, label: str) -> int:
        return self.states.index(label)

    def run(self, text: str, start: int = 0) -> int:
        s = start
        for a in text:
            s = self.goto[s][a]
        return s

    def matches(self, text: str) -> bool:
        """True iff some pattern occurs in ``text``."""
        s = 0
        for a in text:
            s = self.goto[s][a]
            if s in self.accepting:
                return True
        return False

    def __len__(self) -> int:
        return len(self.states)


def build_automaton(patterns: PatternSet | Iterable[str]) -> PatternAutomaton:
    pats = tuple(sorted(set(patterns)))
    if any(set(p) - set(DIFF_ALPHABET) for p in pats):
        raise PatternError("automaton patterns must be over {-,0,+}")
    labels = [""]
    children: list[dict[str, int]] = [{}]
    for p in pats:
        s = 0
        for a in p:
            nxt = children[s].get(a)
            if nxt is None:
                nxt = len(labels)
                labels.append(labels[s] + a)
                children.append({})
                children[s][a] = nxt
            s = nxt
    terminal = {labels.index(p) for p in pats}

    n = len(labels)
    fail = [0] * n
    goto: list[dict[str, int]] = [dict() for _ in range(n)]
    accepting = set(terminal)
    queue: deque[int] = deque()
    for a in DIFF_ALPHABET:
        child = children[0].get(a)
        if child is None:
            goto[0][a] = 0
        else:
            goto[0][a] = child
            queue.append(child)
    # breadth-first, so fail[s] (a shorter label) is complete before s
    while queue:
        s = queue.popleft()
        if fail[s] in accepting:
            accepting.add(s)
        for a in DIFF_ALPHABET:
            child = children[s].get(a)
            if child is None:
                goto[s][a] = goto[fail[s]][a]
            else:
                fail[child] = goto[fail[s]][a]
                goto[s][a] = child
                queue.append(child)
    return PatternAutomaton(tuple(labels), tuple(goto), frozenset(accepting), pats)


def _positivity_automaton(d: PatternSet) -> tuple[PatternAutomaton, int, int] | None:
    """Pruned automaton with its start and target states, or None when a pre-check fails."""
    if d.extended:
        raise PatternError("extended set: use decide_positive_extended")
    m = d.m
    forbidden = d.symmetric().patterns
    start_word = ZERO * m
    target_word = PLUS + ZERO * (m - 1)
    if d.has_all_zero_pattern():
        return None
    if any(p in target_word for p in forbidden):
        return None
    aut = build_automaton(forbidden + (target_word,))
    target = aut.index(target_word)
    removed = frozenset(aut.accepting - {target})
    aut = PatternAutomaton(aut.states, aut.goto, aut.accepting, aut.patterns, removed)
    start = 0
    for a in start_word:
        start = aut.goto[start][a]
        # cannot happen once all-zero patterns are excluded
        assert start not in removed
    return aut, start, target


def _bfs(aut: PatternAutomaton, start: int, target: int) -> str | None:
    """Symbols along a shortest path from ``start`` to ``target`` avoiding removed states."""
    prev: dict[int, tuple[int, str]] = {start: (-1, "")}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        for a in DIFF_ALPHABET:
            t = aut.goto[s][a]
            if t in aut.removed or t in prev:
                continue
            prev[t] = (s, a)
            if t == target:
                path = []
                while t != start:
                    t, sym = prev[t]
                    path.append(sym)
                return "".join(reversed(path))
            queue.append(t)
    return None


def decide_positive(d: PatternSet) -> bool:
    """True iff ``cap(d) > 0``."""
    return shortest_admissible(d) is not None


def shortest_admissible(d: PatternSet) -> str | None:
    """A shortest admissible word, or None when the capacity is zero.

    Ties are broken by the symbol order ``-``, ``0``, ``+``.
    """
    built = _positivity_automaton(d)
    if built is None:
        return None
    aut, start, target = built
    tail = _bfs(aut, start, target)
    if tail is None:
        return None
    return ZERO * d.m + tail


def decide_positive_extended(d: PatternSet, budget: int = DEFAULT_EXPANSION_BUDGET) -> bool:
    """Positivity for sets using ``x`` (±). Exponential in the number of ``x`` symbols."""
    return decide_positive(expand_extended(d, budget=budget))


# the NAE-3SAT reduction lives in its own module; re-exported for convenience
from fdcap.nae3sat import (  # noqa: E402
    Nae3SatInstance,
    nae3sat_brute,
    parse_dimacs,
    reduce_nae3sat,
)

__all__ = [
    "PatternAutomaton",
    "build_automaton",
    "decide_positive",
    "decide_positive_extended",
    "shortest_admissible",
    "Nae3SatInstance",
    "nae3sat_brute",
    "parse_dimacs",
    "reduce_nae3sat",
]
