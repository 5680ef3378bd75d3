"""Regenerate named.json: brute-force delta_n for every named fixture set.

Run from the repository root:  python fixtures/make_named.py
Takes about two minutes, dominated by +0+0+ at n = 10.
"""

import json
from pathlib import Path

from fdcap.brute import max_code
from fdcap.patterns import parse_pattern_set

HERE = Path(__file__).parent
MAX_N = 10


def main() -> None:
    out = {}
    for path in sorted(HERE.glob("*.pat")):
        d = parse_pattern_set(path.read_text())
        deltas = {str(n): max_code(n, d)[0] for n in range(1, MAX_N + 1)}
        out[path.name] = {"patterns": list(d.patterns), "delta": deltas}
        print(path.name, deltas, flush=True)
    (HERE / "named.json").write_text(json.dumps(out, indent=1) + "\n")


if __name__ == "__main__":
    main()
