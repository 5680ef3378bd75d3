"""Not-All-Equal 3SAT instances and their reduction to extended forbidden sets.

An assignment NAE-satisfies a clause when the clause has at least one true
and one false literal. The reduction below produces a set over
``{-,0,+,x}`` whose capacity is positive exactly when the instance is
NAE-satisfiable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from fdcap.errors import FdcapError
from fdcap.patterns import MINUS, PLUS, PM, ZERO, PatternSet, negate

MAX_BRUTE_VARS = 24


class InstanceError(FdcapError, ValueError):
    pass


@dataclass(frozen=True)
class Nae3SatInstance:
    """Clauses are triples of nonzero ints, DIMACS style (``-3`` is not x3)."""

    num_vars: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if self.num_vars < 1:
            raise InstanceError("need at least one variable")
        clauses = tuple(tuple(int(l) for l in c) for c in self.clauses)
        for c in clauses:
            if len(c) != 3:
                raise InstanceError(f"clause {c} does not have exactly 3 literals")
            if any(l == 0 or abs(l) > self.num_vars for l in c):
                raise InstanceError(f"clause {c} has a literal outside 1..{self.num_vars}")
            if len({abs(l) for l in c}) != 3:
                raise InstanceError(f"clause {c} repeats a variable")
        object.__setattr__(self, "clauses", clauses)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> Nae3SatInstance:
    """Read a DIMACS CNF file whose clauses all have three literals."""
    num_vars = None
    declared = None
    clauses = []
    pending: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith(("c", "%")):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InstanceError(f"bad problem line: {line!r}")
            num_vars, declared = int(parts[2]), int(parts[3])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(pending))
                pending = []
            else:
                pending.append(lit)
    if pending:
        clauses.append(tuple(pending))
    if num_vars is None:
        raise InstanceError("missing 'p cnf' line")
    if declared is not None and declared != len(clauses):
        raise InstanceError(f"header declares {declared} clauses, found {len(clauses)}")
    return Nae3SatInstance(num_vars, tuple(clauses))


def reduce_nae3sat(inst: Nae3SatInstance) -> PatternSet:
    """Forbidden set whose capacity is positive iff ``inst`` is NAE-satisfiable.

    With ``m`` variables: the separators ``0 x^k 0`` for ``k = 1..m-1``,
    which force zeros in a difference to be adjacent or at least ``m``
    apart, plus for each clause the length-m word that is ``x`` except
    ``+``/``-`` at its three variables, together with its negation.
    """
    m = inst.num_vars
    if m < 3:
        raise InstanceError("the reduction needs at least 3 variables")
    patterns = [ZERO + PM * k + ZERO for k in range(1, m)]
    for clause in inst.clauses:
        word = [PM] * m
        for lit in clause:
            word[abs(lit) - 1] = PLUS if lit > 0 else MINUS
        p = "".join(word)
        patterns += [p, negate(p)]
    return PatternSet(patterns)


def nae_satisfied(inst: Nae3SatInstance, assignment: tuple[bool, ...]) -> bool:
    for clause in inst.clauses:
        values = {assignment[abs(l) - 1] == (l > 0) for l in clause}
        if len(values) != 2:
            return False
    return True


def nae3sat_brute(inst: Nae3SatInstance) -> bool:
    if inst.num_vars > MAX_BRUTE_VARS:
        raise InstanceError(f"more than {MAX_BRUTE_VARS} variables")
    return any(
        nae_satisfied(inst, a)
        for a in itertools.product((False, True), repeat=inst.num_vars)
    )
