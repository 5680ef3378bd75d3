import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fdcap import PatternSet
from fdcap.brute import max_code
from fdcap.errors import BudgetExhausted, ConstructionError, PatternError
from fdcap.jsr import spectral_radius
from fdcap.transfer import (
    DeBruijnEdge,
    TransferFamily,
    all_edges,
    build_sigma,
    edge_word,
    edges_compatible,
    is_maximal,
    product_norm_delta,
)

from conftest import random_pattern_set

GOLDEN = (1 + math.sqrt(5)) / 2


def all_products_max(fam, n):
    """Entry-sum maximum by plain enumeration of every product."""
    best = 0
    for seq in itertools.product(range(len(fam)), repeat=n):
        p = np.eye(fam.dim, dtype=np.int64)
        for i in seq:
            p = p @ fam.matrices[i]
        best = max(best, int(p.sum()))
    return best


def test_edge_words():
    assert edge_word(DeBruijnEdge("01", 1)) == "011"
    assert edge_word(DeBruijnEdge("00", 0)) == "000"
    assert DeBruijnEdge("01", 1).target == "11"
    for m in (1, 2, 3, 4):
        ws = [edge_word(e) for e in all_edges(m)]
        assert len(set(ws)) == 2**m


def test_edges_compatible():
    d = PatternSet(["0++"])
    e000, e011 = DeBruijnEdge("00", 0), DeBruijnEdge("01", 1)
    assert edges_compatible(e000, e000, d)
    assert not edges_compatible(e000, e011, d)
    for e1, e2 in itertools.product(all_edges(3), repeat=2):
        assert edges_compatible(e1, e2, d) == edges_compatible(e2, e1, d)


def test_sigma_0pp():
    fam = build_sigma(PatternSet(["0++"]))
    assert fam.dim == 4
    assert all(a.shape == (4, 4) for a in fam)
    assert max(spectral_radius(a) for a in fam) == pytest.approx(GOLDEN, rel=1e-12)


def test_sigma_entries_follow_de_bruijn():
    fam = build_sigma(PatternSet(["+0-", "++"]))
    for a in fam:
        assert set(np.unique(a)) <= {0, 1}
        for x, y in zip(*np.nonzero(a)):
            sx, sy = format(x, "02b"), format(y, "02b")
            assert sx[1:] == sy[:-1]


def test_sigma_refusals():
    with pytest.raises(ConstructionError):
        build_sigma(PatternSet(["00", "+"]))
    with pytest.raises(PatternError):
        build_sigma(PatternSet(["0x"]))


def test_matrices_are_maximal(corpus):
    for d, _ in corpus:
        if not d.has_all_zero_pattern():
            assert is_maximal(build_sigma(d), d)


def test_product_norm_delta_n1():
    rng = random.Random(1)
    for _ in range(20):
        d = random_pattern_set(rng)
        if d.has_all_zero_pattern():
            continue
        fam = build_sigma(d)
        assert product_norm_delta(fam, 1) == max(int(a.sum()) for a in fam)


def test_zeros_then_plus_constant():
    for m in (2, 3, 4):
        fam = build_sigma(PatternSet(["0" * (m - 1) + "+"]))
        for n in range(1, 6):
            assert product_norm_delta(fam, n) == 2 ** (m - 1)


def test_frontier_matches_enumeration():
    rng = random.Random(4)
    for _ in range(20):
        d = random_pattern_set(rng, max_len=3)
        if d.has_all_zero_pattern():
            continue
        fam = build_sigma(d)
        for n in (1, 2, 3):
            assert product_norm_delta(fam, n) == all_products_max(fam, n)


def test_product_norm_against_brute_on_corpus(corpus):
    checked = 0
    for d, base in corpus:
        if d.has_all_zero_pattern():
            continue
        fam = build_sigma(d)
        for n in range(1, 5):
            length = d.m - 1 + n
            want = base["delta"].get(str(length)) or max_code(length, d)[0]
            assert product_norm_delta(fam, n) == want, (d, n)
        checked += 1
    assert checked >= 30


def test_frontier_budget():
    fam = build_sigma(PatternSet(["+0+0+"]))
    with pytest.raises(BudgetExhausted):
        product_norm_delta(fam, 4, budget=10)


def test_json_round_trip():
    fam = build_sigma(PatternSet(["+0-", "++"]))
    back = TransferFamily.from_json(fam.to_json())
    assert back.m == fam.m and back.cliques == fam.cliques
    assert all(np.array_equal(a, b) for a, b in zip(fam, back))


def test_norm_dominates_spectral_radius():
    fam = build_sigma(PatternSet(["++-"]))
    for n in range(1, 6):
        for seq in itertools.product(range(len(fam)), repeat=n):
            p = np.eye(fam.dim)
            for i in seq:
                p = p @ fam.matrices[i]
            assert spectral_radius(p) <= p.sum() + 1e-9


def test_upper_bounds_running_min_decreases():
    fam = build_sigma(PatternSet(["+++"]))
    ups = [product_norm_delta(fam, n) ** (1 / n) for n in range(1, 13)]
    running = list(itertools.accumulate(ups, min))
    assert running[-1] < running[0]
    assert running[-1] >= 1.8392867552141612 - 1e-9


@settings(max_examples=30, deadline=None)
@given(st.lists(st.text(alphabet="-0+", min_size=1, max_size=3), min_size=1, max_size=3))
def test_product_norm_property(pats):
    d = PatternSet(pats)
    if d.has_all_zero_pattern():
        return
    fam = build_sigma(d)
    for n in (1, 2, 3):
        assert product_norm_delta(fam, n) == max_code(d.m - 1 + n, d)[0]
