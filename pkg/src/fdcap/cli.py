"""Command-line interface: ``python -m fdcap <command> [options]``.

Exit codes: 0 success, 1 usage or input error, 2 computation budget
exceeded, 3 a self-check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import platform
import sys
import time
from pathlib import Path

import networkx
import numpy as np
import scipy

from fdcap import __version__
from fdcap.bounds import (
    BoundsError,
    corollary2_bracket,
    n_for_accuracy,
    positive_floor,
    theorem1_bracket,
    zero_capacity_code_bound,
)
from fdcap.brute import DEFAULT_NODE_BUDGET, max_code
from fdcap.errors import BudgetExhausted, FdcapError, InvariantViolation
from fdcap.jsr import capacity, verify_certificate
from fdcap.nae3sat import MAX_BRUTE_VARS, nae3sat_brute, parse_dimacs, reduce_nae3sat
from fdcap.patterns import PatternSet, expand_extended, parse_pattern_set
from fdcap.positivity import DEFAULT_EXPANSION_BUDGET, shortest_admissible
from fdcap.transfer import build_sigma, product_norm_delta

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_INVARIANT = 0, 1, 2, 3
SIGMA_SELF_CHECK = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _real(x: float) -> float | str | None:
    if x is None:
        return None
    if math.isinf(x) or math.isnan(x):
        return str(x)
    return float(f"{x:.15g}")


def _clean(obj):
    """Round every float to 15 significant digits and make the tree JSON-safe."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _real(float(obj))
    return obj


def _fmt(x: float) -> str:
    return f"{x:.12f}"


# ---------------------------------------------------------------- commands


def _load_patterns(args) -> PatternSet:
    if not args.patterns:
        raise UsageError("--patterns FILE is required")
    try:
        text = Path(args.patterns).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {args.patterns}: {exc}") from exc
    return parse_pattern_set(text)


def _plain(d: PatternSet, budget: int) -> PatternSet:
    budget = min(budget, DEFAULT_EXPANSION_BUDGET)
    return expand_extended(d, budget=budget) if d.extended else d


def cmd_analyze(args, d: PatternSet) -> tuple[dict, list[str]]:
    plain = _plain(d, args.budget)
    word = shortest_admissible(plain)
    eps = args.eps if args.eps is not None else 0.1
    out = {
        "positive": word is not None,
        "shortest_word": word,
        "n_for_accuracy": {"eps": eps, "n": n_for_accuracy(plain, eps)},
    }
    lines = [f"capacity is {'positive' if word else 'zero'}"]
    if word:
        out["floor"] = positive_floor(plain)
        lines.append(f"admissible word {word} (length {len(word)})")
        lines.append(f"capacity >= {_fmt(out['floor'])}")
    else:
        out["code_size_bound"] = zero_capacity_code_bound(plain)
        lines.append(f"every code has at most {out['code_size_bound']} words")
    lines.append(f"n = {out['n_for_accuracy']['n']} gives a bracket of width <= {eps}")
    return out, lines


def cmd_delta(args, d: PatternSet) -> tuple[dict, list[str]]:
    if args.n is None:
        raise UsageError("delta needs --n")
    size, code = max_code(args.n, _plain(d, args.budget), budget=args.budget)
    out = {"n": args.n, "delta_n": size, "witness": list(code.words)}
    return out, [f"delta_{args.n} = {size}", *code.words]


def _brackets(n: int, delta: int, d: PatternSet) -> dict:
    row = {"n": n, "delta_n": delta}
    t1 = theorem1_bracket(n, delta, d)
    row["sandwich"] = {"lower": t1.lower, "upper": t1.upper, "raw_lower": t1.raw_lower}
    try:
        c2 = corollary2_bracket(n, delta, d)
        row["zero_free"] = {"lower": c2.lower, "upper": c2.upper}
    except BoundsError:
        row["zero_free"] = None
    return row


def cmd_bounds(args, d: PatternSet) -> tuple[dict, list[str]]:
    plain = _plain(d, args.budget)
    start = max(1, plain.r1 + plain.r2)
    if args.n_max is not None:
        lengths = range(start, args.n_max + 1)
    elif args.n is not None:
        lengths = [args.n]
    else:
        raise UsageError("bounds needs --n or --n-max")
    rows = [_brackets(n, max_code(n, plain, budget=args.budget)[0], plain) for n in lengths]
    if args.n_max is not None and not args.json:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "delta_n", "lower", "upper"])
        for r in rows:
            w.writerow([r["n"], r["delta_n"], _real(r["sandwich"]["lower"]),
                        _real(r["sandwich"]["upper"])])
        return {"rows": rows, "csv": True}, [buf.getvalue().rstrip("\n")]
    lines = []
    for r in rows:
        t1 = r["sandwich"]
        lines.append(f"n={r['n']} delta_n={r['delta_n']}: "
                     f"{_fmt(t1['lower'])} <= cap <= {_fmt(t1['upper'])}")
        if r["zero_free"]:
            c2 = r["zero_free"]
            lines.append(f"  specialised: {_fmt(c2['lower'])} <= cap <= {_fmt(c2['upper'])}")
    return {"rows": rows}, lines


def cmd_positivity(args, d: PatternSet) -> tuple[dict, list[str]]:
    word = shortest_admissible(_plain(d, args.budget))
    out = {"positive": word is not None, "shortest_word": word}
    if word is None:
        return out, ["zero capacity", "no admissible word"]
    return out, ["positive capacity", f"shortest admissible word: {word}"]


def cmd_shortest_word(args, d: PatternSet) -> tuple[dict, list[str]]:
    word = shortest_admissible(_plain(d, args.budget))
    return {"shortest_word": word}, [word if word is not None else "none"]


def cmd_sigma(args, d: PatternSet) -> tuple[dict, list[str]]:
    fam = build_sigma(d)
    checks = []
    for n in range(1, SIGMA_SELF_CHECK + 1):
        via_products = product_norm_delta(fam, n)
        via_brute = max_code(fam.m - 1 + n, d, budget=args.budget)[0]
        checks.append({"n": n, "products": via_products, "brute": via_brute})
        if via_products != via_brute:
            raise InvariantViolation(
                f"product norm {via_products} != delta_{fam.m - 1 + n} = {via_brute}"
            )
    out = {"family": json.loads(fam.to_json()), "self_check": checks}
    lines = [f"{len(fam)} matrices of dimension {fam.dim}"]
    for i, (a, c) in enumerate(zip(fam.matrices, fam.cliques)):
        lines.append(f"A{i}  edges {' '.join(c)}")
        lines += ["  " + " ".join(str(int(x)) for x in row) for row in a]
    lines.append("self-check passed: " + ", ".join(
        f"delta_{fam.m - 1 + c['n']}={c['brute']}" for c in checks))
    return out, lines


def _capacity_payload(res, verify: bool) -> tuple[dict, list[str]]:
    out = {
        "certified": res.certified,
        "capacity": res.value,
        "lower": res.lower,
        "upper": res.upper,
        "method": res.method,
        "family_size": res.family_size,
    }
    if res.bracket is not None:
        out["jsr"] = {
            "lower": res.bracket.lower,
            "upper": res.bracket.upper,
            "best_product": list(res.bracket.best_product),
            "partial": res.bracket.partial,
        }
    if res.sandwich is not None:
        t = res.sandwich
        out["sandwich"] = {"n": t.n, "delta_n": t.delta_n, "lower": t.lower, "upper": t.upper}
    lines = []
    if res.certified:
        lines.append(f"capacity {_fmt(res.value)}")
    else:
        lines.append(f"{_fmt(res.lower)} <= capacity <= {_fmt(res.upper)}")
    lines.append(f"method: {res.method}")
    if res.certificate is not None:
        cert = res.certificate
        out["certificate"] = {
            "lambda": cert.lambda_,
            "product": list(cert.product),
            "vertex_pairs": len(cert.polytope.vertices),
            "steps": cert.steps,
            "margin": cert.margin,
            "slack": cert.slack,
        }
        lines.append(
            f"invariant polytope: {len(cert.polytope.vertices)} vertex pairs, "
            f"{cert.steps} rounds, product {list(cert.product)}"
        )
        if verify:
            fam = build_sigma(res.patterns)
            ok = verify_certificate(fam, cert)
            out["certificate"]["verified"] = ok
            if not ok:
                raise InvariantViolation("certificate failed independent verification")
            lines.append("numerically certified to tolerance (independent re-check passed)")
    if res.sandwich is not None:
        t = res.sandwich
        lines.append(f"brute delta_{t.n} = {t.delta_n}: {_fmt(t.lower)} <= cap <= {_fmt(t.upper)}")
    return out, lines


def cmd_jsr(args, d: PatternSet) -> tuple[dict, list[str]]:
    eps = args.eps if args.eps is not None else 1e-3
    res = capacity(d, mode="bracket", eps=eps, n_max=args.n_max, brute_n=args.n or 8)
    return _capacity_payload(res, verify=False)


def cmd_certify(args, d: PatternSet) -> tuple[dict, list[str]]:
    eps = args.eps if args.eps is not None else 1e-8
    res = capacity(d, mode="certify", eps=eps, n_max=args.n_max, brute_n=args.n or 8)
    out, lines = _capacity_payload(res, verify=True)
    if args.cert_out and res.certificate is not None:
        Path(args.cert_out).write_text(res.certificate.to_json() + "\n")
        lines.append(f"certificate written to {args.cert_out}")
    return out, lines


def cmd_reduce(args) -> tuple[dict, list[str], dict]:
    if not args.cnf:
        raise UsageError("reduce-nae3sat needs --cnf FILE")
    try:
        inst = parse_dimacs(Path(args.cnf).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {args.cnf}: {exc}") from exc
    d = reduce_nae3sat(inst)
    out = {"num_vars": inst.num_vars, "clauses": [list(c) for c in inst.clauses],
           "pattern_file": d.to_text()}
    lines = [d.to_text().rstrip("\n")]
    if inst.num_vars <= MAX_BRUTE_VARS:
        sat = nae3sat_brute(inst)
        positive = shortest_admissible(_plain(d, args.budget)) is not None
        out["check"] = {"nae_satisfiable": sat, "positive_capacity": positive}
        if sat != positive:
            raise InvariantViolation("reduction check failed: satisfiability != positivity")
        lines.append(f"# check: NAE-satisfiable={sat}, positive capacity={positive}")
    return out, lines, {"cnf": args.cnf, "num_vars": inst.num_vars}


COMMANDS = {
    "analyze": cmd_analyze,
    "delta": cmd_delta,
    "bounds": cmd_bounds,
    "positivity": cmd_positivity,
    "shortest-word": cmd_shortest_word,
    "sigma": cmd_sigma,
    "jsr": cmd_jsr,
    "certify": cmd_certify,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fdcap", description="Capacity of codes avoiding forbidden difference patterns.")
    p.add_argument("--version", action="version", version=f"fdcap {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in [*COMMANDS, "reduce-nae3sat"]:
        s = sub.add_parser(name)
        s.add_argument("--patterns", metavar="FILE")
        s.add_argument("--cnf", metavar="FILE")
        s.add_argument("--n", type=int)
        s.add_argument("--n-max", type=int)
        s.add_argument("--eps", type=float)
        s.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET)
        s.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        s.add_argument("--json", action="store_true")
        s.add_argument("--out", metavar="FILE")
        s.add_argument("--cert-out", metavar="FILE", help="certify: write the certificate JSON here")
    return p


def _provenance(args, wall: float) -> dict:
    return {
        "fdcap": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "networkx": networkx.__version__,
        "budget": args.budget,
        "eps": args.eps,
        "n": args.n,
        "n_max": args.n_max,
        "threads": args.threads,
        "wall_time_s": wall,
    }


def _emit(args, report: dict, lines: list[str]) -> None:
    if args.json:
        text = json.dumps(_clean(report), indent=2) + "\n"
    else:
        text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def run(argv: list[str] | None = None) -> int:
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"fdcap: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "reduce-nae3sat":
            payload, lines, echo = cmd_reduce(args)
        else:
            d = _load_patterns(args)
            echo = {"patterns": list(d.patterns), **d.params()}
            payload, lines = COMMANDS[args.command](args, d)
    except UsageError as exc:
        print(f"fdcap: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExhausted as exc:
        print(f"fdcap: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InvariantViolation as exc:
        print(f"fdcap: self-check failed: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (FdcapError, ValueError) as exc:
        print(f"fdcap: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = {
        "command": args.command,
        "input": echo,
        "result": payload,
        "provenance": _provenance(args, time.perf_counter() - start),
    }
    _emit(args, report, lines)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
