"""Exhaustive ground truth: maximum codes and admissible-word search.

Everything here is exponential on purpose. These routines are the
reference that the transfer-matrix and automaton constructions are
checked against, so they work directly from the definitions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from fdcap.errors import BudgetExhausted, PatternError
from fdcap.patterns import MINUS, PLUS, ZERO, PatternSet, avoids, difference

log = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 10**8
MAX_BRUTE_LENGTH = 16


@dataclass(frozen=True)
class Code:
    n: int
    words: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.words)

    def verify(self, d: PatternSet) -> bool:
        """Re-check every ordered pair of distinct words from scratch."""
        for u in self.words:
            if len(u) != self.n:
                return False
            for v in self.words:
                if u != v and not avoids(difference(u, v), d):
                    return False
        return True


def _to_word(x: int, n: int) -> str:
    return format(x, f"0{n}b") if n else ""


def compatibility_graph(n: int, d: PatternSet) -> list[int]:
    """Adjacency bitsets of the graph on ``{0,1}^n`` (vertex k is the word ``bin(k)``).

    ``u ~ v`` iff ``u != v`` and ``u - v`` avoids ``D ∪ -D``. An occurrence
    of a pattern at a fixed offset pins the bits of ``v`` on that window
    once ``u`` is known, so the forbidden partners of ``u`` are unions of
    cosets ``{v : v & mask == value}``.
    """
    if d.extended:
        raise PatternError("expand extended patterns before building the graph")
    size = 1 << n
    idx = np.arange(size, dtype=np.int64)
    # bit of word position i (0 = leftmost) is (x >> (n-1-i)) & 1
    placements = []
    for p in d.symmetric():
        for start in range(n - len(p) + 1):
            mask = 0
            for i in range(len(p)):
                mask |= 1 << (n - 1 - (start + i))
            placements.append((p, start, idx & mask))
    full = (1 << size) - 1
    adj = []
    for u in range(size):
        blocked = np.zeros(size, dtype=bool)
        for p, start, masked in placements:
            value = _pinned_partner_bits(u, p, start, n)
            if value is not None:
                blocked |= masked == value
        row = np.packbits(~blocked, bitorder="little")
        bits = int.from_bytes(row.tobytes(), "little") & full
        adj.append(bits & ~(1 << u))
    return adj


def _pinned_partner_bits(u: int, p: str, start: int, n: int) -> int | None:
    """Bits that ``v`` must carry on the window for ``u - v`` to show ``p`` there."""
    value = 0
    for i, sym in enumerate(p):
        shift = n - 1 - (start + i)
        bit = (u >> shift) & 1
        if sym == ZERO:
            vb = bit
        elif sym == PLUS:
            if bit != 1:
                return None
            vb = 0
        else:
            if bit != 0:
                return None
            vb = 1
        value |= vb << shift
    return value


def _initial_order(adj: list[int]) -> list[int]:
    """Non-increasing degree, ties by index."""
    return sorted(range(len(adj)), key=lambda u: (-adj[u].bit_count(), u))


def max_clique(adj: list[int], budget: int = DEFAULT_NODE_BUDGET) -> list[int]:
    """Maximum clique by branch and bound with greedy-coloring bounds.

    Vertices are renumbered by non-increasing degree; each node colours its
    candidate set greedily and branches from the highest colour class down,
    cutting as soon as clique size plus colour count cannot beat the best.

    ``adj`` holds neighbourhood bitsets. Raises BudgetExhausted when more
    than ``budget`` search nodes are expanded.
    """
    n = len(adj)
    if n == 0:
        return []
    order = _initial_order(adj)
    pos = {v: i for i, v in enumerate(order)}
    radj = [0] * n
    for v in range(n):
        bits = adj[v]
        out = 0
        while bits:
            low = bits & -bits
            out |= 1 << pos[low.bit_length() - 1]
            bits ^= low
        radj[pos[v]] = out

    best: list[int] = []
    # greedy seed
    cand = (1 << n) - 1
    seed = []
    while cand:
        v = max(_iter_bits(cand), key=lambda u: (radj[u] & cand).bit_count())
        seed.append(v)
        cand &= radj[v]
    best = seed
    nodes = 0

    def colour(p: int) -> list[tuple[int, int]]:
        out = []
        k = 0
        uncoloured = p
        while uncoloured:
            k += 1
            q = uncoloured
            while q:
                low = q & -q
                v = low.bit_length() - 1
                q &= ~radj[v] & ~low
                uncoloured &= ~low
                out.append((v, k))
        return out

    def expand(clique: list[int], p: int) -> None:
        nonlocal best, nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExhausted(f"max_clique exceeded {budget} nodes")
        for v, k in reversed(colour(p)):
            if len(clique) + k <= len(best):
                return
            clique.append(v)
            newp = p & radj[v]
            if newp:
                expand(clique, newp)
            elif len(clique) > len(best):
                best = list(clique)
            clique.pop()
            p &= ~(1 << v)

    expand([], (1 << n) - 1)
    log.debug("max_clique: %d vertices, %d nodes, size %d", n, nodes, len(best))
    return sorted(order[v] for v in best)


def _iter_bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def max_code(n: int, d: PatternSet, budget: int = DEFAULT_NODE_BUDGET) -> tuple[int, Code]:
    """Exact ``delta_n(D)`` with a maximum witness code.

    Self-differences are not constrained, so the answer is always at
    least 1 even when ``D`` contains an all-zero pattern.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > MAX_BRUTE_LENGTH:
        raise BudgetExhausted(f"n={n} exceeds brute-force limit {MAX_BRUTE_LENGTH}")
    adj = compatibility_graph(n, d)
    clique = max_clique(adj, budget)
    code = Code(n, tuple(_to_word(v, n) for v in clique))
    return len(code), code


def prop1_code(m: int, k: int) -> Code:
    """The code ``{z1 0 z2 0 ... zk 0 : zi in {0,1}^(m-1)}`` of length ``k*m``.

    It has ``2**((m-1)*k)`` words and avoids ``{+,-}^m``: every m-window of
    a difference contains one of the separator zeros.
    """
    if m < 2 or k < 1:
        raise ValueError("need m >= 2 and k >= 1")
    blocks = [format(z, f"0{m - 1}b") + "0" for z in range(2 ** (m - 1))]
    words = [""]
    for _ in range(k):
        words = [w + b for w in words for b in blocks]
    return Code(k * m, tuple(words))


def admissible_word_search(d: PatternSet, max_len: int) -> str | None:
    """Shortest word starting with ``0^m``, ending with ``+0^(m-1)`` and avoiding ``D ∪ -D``.

    Plain depth-limited search over ``{-,0,+}``, tried for every length
    from ``2m`` up to ``max_len``. Results are memoised on (last ``m``
    symbols, remaining length): no pattern is longer than ``m``, and ``m``
    symbols are enough to recognise the target suffix.
    """
    if d.extended:
        raise PatternError("expand extended patterns first")
    m = d.m
    forbidden = d.symmetric().patterns
    start = ZERO * m
    target = PLUS + ZERO * (m - 1)
    if not avoids(start, forbidden):
        return None

    def bad_suffix(word: str) -> bool:
        return any(word.endswith(p) for p in forbidden)

    @lru_cache(maxsize=None)
    def search(tail: str, remaining: int) -> str | None:
        if remaining == 0:
            return "" if tail.endswith(target) else None
        for sym in (MINUS, ZERO, PLUS):
            ext = tail + sym
            if bad_suffix(ext):
                continue
            rest = search(ext[-m:], remaining - 1)
            if rest is not None:
                return sym + rest
        return None

    # the target must be fully written after the start block, so length >= 2m
    for length in range(2 * m, max_len + 1):
        tail = search(start, length - m)
        if tail is not None:
            return start + tail
    return None
