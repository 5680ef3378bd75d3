"""Transfer matrices Sigma(D) built on the de Bruijn graph of (m-1)-bit states.

A binary word of length ``m - 1 + n`` is a walk of ``n`` edges in the de
Bruijn graph, each edge being one m-bit window of the word. A set of words
is a valid code exactly when, at every window position, the windows used
by the code are pairwise compatible (their difference avoids ``D ∪ -D``).
Selecting one maximal compatible edge set per position therefore turns
code sizes into entry sums of matrix products:

    delta_{m-1+n}(D) = max ||A_1 ... A_n||,  A_i in Sigma(D),

with ``||.||`` the sum of all entries.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Iterator

import networkx as nx
import numpy as np

from fdcap.errors import BudgetExhausted, ConstructionError, PatternError
from fdcap.patterns import PatternSet, avoids, difference

log = logging.getLogger(__name__)

DEFAULT_M_CAP = 6
DEFAULT_FRONTIER_BUDGET = 200_000


@dataclass(frozen=True)
class DeBruijnEdge:
    source: str
    bit: int

    @property
    def target(self) -> str:
        return (self.source + str(self.bit))[1:]


def edge_word(e: DeBruijnEdge) -> str:
    return e.source + str(e.bit)


def all_edges(m: int) -> list[DeBruijnEdge]:
    """The 2**m edges, ordered so that ``edge_word`` runs through 0..2**m-1 in binary."""
    out = []
    for w in range(2**m):
        word = format(w, f"0{m}b")
        out.append(DeBruijnEdge(word[:-1], int(word[-1])))
    return out


def _check_plain(d: PatternSet) -> None:
    if d.extended:
        raise PatternError("expand extended patterns first")
    if d.has_all_zero_pattern():
        raise ConstructionError(
            "all-zero pattern present: an edge would be incompatible with itself"
        )


def edges_compatible(e1: DeBruijnEdge, e2: DeBruijnEdge, d: PatternSet) -> bool:
    _check_plain(d)
    w1, w2 = edge_word(e1), edge_word(e2)
    if len(w1) != len(w2):
        raise ValueError("edges come from different de Bruijn graphs")
    return avoids(difference(w1, w2), d.symmetric())


@dataclass(frozen=True)
class TransferFamily:
    """The matrix family for one pattern set.

    ``cliques[i]`` lists the edge words selected by ``matrices[i]``.
    """

    m: int
    matrices: tuple[np.ndarray, ...]
    cliques: tuple[tuple[str, ...], ...]

    @property
    def dim(self) -> int:
        return 2 ** (self.m - 1)

    def __len__(self) -> int:
        return len(self.matrices)

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.matrices)

    def to_json(self) -> str:
        return json.dumps(
            {
                "m": self.m,
                "dim": self.dim,
                "matrices": [
                    {"entries": a.astype(int).tolist(), "edges": list(c)}
                    for a, c in zip(self.matrices, self.cliques)
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> TransferFamily:
        data = json.loads(text)
        mats = []
        for item in data["matrices"]:
            a = np.array(item["entries"], dtype=np.int64)
            a.setflags(write=False)
            mats.append(a)
        cliques = tuple(tuple(item.get("edges", ())) for item in data["matrices"])
        return cls(data["m"], tuple(mats), cliques)


def compatibility_edges(d: PatternSet, m: int | None = None) -> nx.Graph:
    _check_plain(d)
    m = d.m if m is None else m
    edges = all_edges(m)
    forbidden = d.symmetric()
    g = nx.Graph()
    g.add_nodes_from(edge_word(e) for e in edges)
    words = [edge_word(e) for e in edges]
    for i, u in enumerate(words):
        for v in words[i + 1:]:
            if avoids(difference(u, v), forbidden):
                g.add_edge(u, v)
    return g


def clique_matrix(words: tuple[str, ...], m: int) -> np.ndarray:
    dim = 2 ** (m - 1)
    a = np.zeros((dim, dim), dtype=np.int64)
    for w in words:
        x = int(w[:-1], 2) if m > 1 else 0
        y = int(w[1:], 2) if m > 1 else 0
        a[x, y] = 1
    a.setflags(write=False)
    return a


def build_sigma(d: PatternSet, m_cap: int = DEFAULT_M_CAP) -> TransferFamily:
    """One 0/1 matrix per maximal clique of the edge compatibility graph."""
    _check_plain(d)
    m = d.m
    if m > m_cap:
        raise ConstructionError(f"m={m} exceeds the cap {m_cap}")
    g = compatibility_edges(d, m)
    cliques = sorted(tuple(sorted(c)) for c in nx.find_cliques(g))
    mats = []
    seen = set()
    kept = []
    for c in cliques:
        a = clique_matrix(c, m)
        key = a.tobytes()
        if key in seen:
            continue
        seen.add(key)
        mats.append(a)
        kept.append(c)
    log.debug("build_sigma %s: %d matrices of dim %d", d, len(mats), 2 ** (m - 1))
    return TransferFamily(m, tuple(mats), tuple(kept))


def _unique_rows(vectors: np.ndarray) -> np.ndarray:
    # lexsort plus adjacent comparison; much faster than np.unique(axis=0)
    if len(vectors) < 2:
        return vectors
    rows = vectors[np.lexsort(vectors.T[::-1])]
    keep = np.ones(len(rows), dtype=bool)
    keep[1:] = np.any(rows[1:] != rows[:-1], axis=1)
    return rows[keep]


def pareto_front(vectors: np.ndarray) -> np.ndarray:
    """Rows not dominated entrywise by another row (duplicates collapsed)."""
    vectors = _unique_rows(vectors)
    # larger sums first: a row can only be dominated by one with a larger or equal sum
    vectors = vectors[np.argsort(-vectors.sum(axis=1), kind="stable")]
    n, d = vectors.shape
    kept = np.empty_like(vectors)
    count = 0
    start = 0
    while start < n:
        # size blocks so the broadcast comparison stays around 2e7 cells
        size = max(1, min(4096, 20_000_000 // ((count + 1) * d)))
        block = vectors[start : start + size]
        start += size
        if count:
            hit = (kept[None, :count, :] >= block[:, None, :]).all(axis=2).any(axis=1)
            block = block[~hit]
        first = count
        for v in block:
            if count > first and np.any(np.all(kept[first:count] >= v, axis=1)):
                continue
            kept[count] = v
            count += 1
    return kept[:count]


def product_norm_delta(
    fam: TransferFamily, n: int, budget: int = DEFAULT_FRONTIER_BUDGET
) -> int:
    """Maximum entry sum over all products of ``n`` matrices, i.e. ``delta_{m-1+n}``.

    Instead of enumerating ``|Sigma|**n`` products, keep the set of row
    vectors ``1^T A_1 ... A_k`` reachable so far and drop any vector that is
    entrywise dominated by another; nonnegative matrices preserve the
    domination, so the maximum is unchanged.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    front = np.ones((1, fam.dim), dtype=np.int64)
    for _ in range(n):
        images = np.concatenate([front @ a for a in fam.matrices], axis=0)
        front = pareto_front(images)
        if len(front) > budget:
            raise BudgetExhausted(f"frontier grew to {len(front)} vectors (budget {budget})")
    return int(front.sum(axis=1).max())


def is_maximal(fam: TransferFamily, d: PatternSet) -> bool:
    """Check that no edge can be added to any selected edge set."""
    g = compatibility_edges(d, fam.m)
    for c in fam.cliques:
        members = set(c)
        for w in g.nodes:
            if w not in members and all(g.has_edge(w, u) for u in members):
                return False
    return True
