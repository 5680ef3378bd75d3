import json
import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from fdcap import PatternSet
from fdcap.patterns import parse_pattern_set

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


def load_pat(name: str) -> PatternSet:
    return parse_pattern_set((FIXTURES / name).read_text())


def corpus_sets() -> list[dict]:
    return json.loads((FIXTURES / "corpus.json").read_text())["sets"]


def named_sets() -> dict:
    return json.loads((FIXTURES / "named.json").read_text())


def random_pattern_set(rng: random.Random, max_len: int = 4, max_count: int = 3) -> PatternSet:
    count = rng.randint(1, max_count)
    return PatternSet(
        "".join(rng.choice("-0+") for _ in range(rng.randint(1, max_len)))
        for _ in range(count)
    )


diff_words = st.text(alphabet="-0+", min_size=1, max_size=12)
patterns = st.text(alphabet="-0+", min_size=1, max_size=4)
pattern_sets = st.lists(patterns, min_size=1, max_size=4).map(PatternSet)
extended_patterns = st.text(alphabet="-0+x", min_size=1, max_size=5)


@st.composite
def word_pairs(draw, max_len=12):
    n = draw(st.integers(1, max_len))
    bits = st.text(alphabet="01", min_size=n, max_size=n)
    return draw(bits), draw(bits)


@pytest.fixture(scope="session")
def corpus():
    return [(PatternSet(s["patterns"]), s) for s in corpus_sets()]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[number])
