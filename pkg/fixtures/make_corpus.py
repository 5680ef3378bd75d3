"""Regenerate corpus.json: random small forbidden sets with brute-force baselines.

Run from the repository root:  python fixtures/make_corpus.py
The output is deterministic for a fixed seed.
"""

import json
import random
from pathlib import Path

from fdcap import PatternSet
from fdcap.brute import admissible_word_search, max_code

SEED = 20240611
COUNT = 50
MAX_N = 8


def random_set(rng: random.Random) -> PatternSet:
    m = rng.randint(2, 4)
    k = rng.randint(1, 3)
    pats = ["".join(rng.choice("-0+") for _ in range(m))]
    for _ in range(k - 1):
        length = rng.randint(2, m)
        pats.append("".join(rng.choice("-0+") for _ in range(length)))
    return PatternSet(pats)


def baseline(d: PatternSet) -> dict:
    word = admissible_word_search(d, 2 * d.M + 2 * d.m)
    return {
        "patterns": list(d.patterns),
        "delta": {str(n): max_code(n, d)[0] for n in range(1, MAX_N + 1)},
        "positive": word is not None,
        "shortest_len": None if word is None else len(word),
    }


def main() -> None:
    rng = random.Random(SEED)
    seen, out = set(), []
    while len(out) < COUNT:
        d = random_set(rng)
        if d.patterns in seen:
            continue
        seen.add(d.patterns)
        out.append(baseline(d))
    path = Path(__file__).with_name("corpus.json")
    path.write_text(json.dumps({"seed": SEED, "max_n": MAX_N, "sets": out}, indent=1) + "\n")
    print(f"wrote {len(out)} sets to {path}")


if __name__ == "__main__":
    main()
