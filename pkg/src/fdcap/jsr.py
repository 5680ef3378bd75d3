"""Joint spectral radius of transfer families: brackets and exact certification.

Three tools, from cheap to strong:

* ``product_bracket`` enumerates products. Spectral radii of products give
  lower bounds, norms of products give upper bounds.
* ``certify_candidate`` tries to prove that a given product attains the
  joint spectral radius by growing a symmetric polytope from its leading
  eigenvector until every matrix, scaled by the candidate value, maps the
  polytope into itself.
* ``polytope_iterate`` runs the same polytope growth from the
  cross-polytope with a trial scale, which yields a rigorous upper bound
  whenever the trial scale exceeds the true value.

Certification is numerical: containment is decided by linear programs
with a relative slack (default 1e-9), not in exact arithmetic.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from fdcap.bounds import ROUND_SLACK, CapacityBracket, theorem1_bracket
from fdcap.brute import max_code
from fdcap.errors import (
    BudgetExhausted,
    ConstructionError,
    InvariantViolation,
    NumericalError,
    PatternError,
)
from fdcap.patterns import PatternSet
from fdcap.polytope import WITNESS_TOL, SymPolytope, minkowski_norm, prune_vertices
from fdcap.positivity import decide_positive
from fdcap.transfer import TransferFamily, build_sigma, pareto_front

log = logging.getLogger(__name__)

CERT_SLACK = 1e-9
DEFAULT_PRODUCT_BUDGET = 2_000_000
# frontier pruning is quadratic in the frontier size, so keep this modest
BRACKET_FRONTIER_BUDGET = 5_000
DEFAULT_MAX_VERTICES = 600

MatrixList = Sequence[np.ndarray]


def _matrices(fam: TransferFamily | MatrixList) -> list[np.ndarray]:
    mats = fam.matrices if isinstance(fam, TransferFamily) else fam
    return [np.asarray(a, dtype=float) for a in mats]


# ---------------------------------------------------------------- eigenvalues


def spectral_radius(a: np.ndarray, tol: float = 1e-12, max_iter: int = 200) -> float:
    """Largest eigenvalue modulus.

    Nonnegative matrices go through shifted power iteration: ``A + I`` has
    ``rho(A) + 1`` as its unique dominant eigenvalue, and the Collatz-
    Wielandt quotients of a positive iterate bracket it. If that bracket
    does not close to ``tol`` within ``max_iter`` steps (reducible
    matrices can converge slowly), or ``a`` has negative entries, the full eigenvalue
    decomposition decides.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("square matrix required")
    d = a.shape[0]
    if d > 64:
        raise ValueError("dimension above 64 is not supported")
    if not np.any(a):
        return 0.0
    if np.all(a >= 0):
        shifted = a + np.eye(d)
        x = np.ones(d)
        for _ in range(max_iter):
            y = shifted @ x
            ratios = y / x
            lo, hi = ratios.min(), ratios.max()
            if hi - lo <= tol * hi:
                return float(0.5 * (lo + hi) - 1.0)
            x = y / y.max()
            if x.min() < 1e-150:
                break
    try:
        ev = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue computation failed: {exc}") from exc
    return float(np.max(np.abs(ev)))


def leading_eigenvector(pi: np.ndarray, gap: float = 1e-9) -> tuple[float, np.ndarray]:
    """Dominant eigenvalue and unit eigenvector of ``pi``.

    The dominant eigenvalue must be real and strictly larger in modulus
    than all others; the vector is scaled to Euclidean length one with its
    first nonzero component positive.
    """
    pi = np.asarray(pi, dtype=float)
    ev, vecs = np.linalg.eig(pi)
    order = np.argsort(-np.abs(ev), kind="stable")
    top = ev[order[0]]
    scale = max(abs(top), 1.0)
    if abs(top.imag) > 1e-12 * scale:
        raise NumericalError("dominant eigenvalue is not real")
    if len(ev) > 1 and abs(ev[order[1]]) >= abs(top) - gap * scale:
        raise NumericalError("dominant eigenvalue is not simple in modulus")
    if abs(top) == 0:
        raise NumericalError("matrix is nilpotent")
    v = np.real(vecs[:, order[0]])
    v = v / np.linalg.norm(v)
    first = np.flatnonzero(np.abs(v) > 1e-14)[0]
    if v[first] < 0:
        v = -v
    return float(top.real), v


# ---------------------------------------------------------------- product enumeration


@dataclass
class JsrBracket:
    lower: float
    upper: float
    best_product: tuple[int, ...]
    partial: bool = False
    certified: bool = False
    log: list[dict] = field(default_factory=list)

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _is_necklace(seq: tuple[int, ...]) -> bool:
    """True iff ``seq`` is the lexicographically least of its rotations."""
    return all(seq <= seq[i:] + seq[:i] for i in range(1, len(seq)))


def entry_sum_norm(a: np.ndarray) -> float:
    return float(np.abs(a).sum())


def _max_entry_sum(mats: list[np.ndarray], n: int, budget: int = BRACKET_FRONTIER_BUDGET) -> float:
    """Max over length-n products of the entry sum, via dominance pruning of row vectors."""
    front = np.ones((1, mats[0].shape[0]))
    for _ in range(n):
        front = pareto_front(np.concatenate([front @ a for a in mats], axis=0))
        if len(front) > budget:
            raise BudgetExhausted(f"frontier grew to {len(front)} vectors")
    return float(front.sum(axis=1).max())


def product_bracket(
    fam: TransferFamily | MatrixList,
    n_max: int,
    norm: Callable[[np.ndarray], float] | None = None,
    norm_lengths: int | None = None,
    budget: int = DEFAULT_PRODUCT_BUDGET,
) -> JsrBracket:
    """Bracket the joint spectral radius from products of length ``<= n_max``.

    lower = max rho(P)**(1/len(P)) over products P (one per rotation class),
    upper = min over lengths L of max ||P||**(1/L) over products of length L.

    ``norm`` defaults to the entry-sum norm, which for nonnegative
    families is evaluated without enumerating products. A custom norm must
    be an operator norm; it is evaluated on all products of length up to
    ``norm_lengths`` (default 1).
    """
    mats = _matrices(fam)
    k = len(mats)
    d = mats[0].shape[0]
    lower, best = 0.0, ()
    upper = math.inf
    partial = False
    count = 0
    rows: list[dict] = []
    nonneg = all(np.all(a >= 0) for a in mats)

    if norm is None and nonneg:
        try:
            for length in range(1, n_max + 1):
                upper = min(upper, _max_entry_sum(mats, length) ** (1.0 / length))
        except BudgetExhausted:
            # shorter lengths already gave a valid bound
            partial = True
            log.info("product_bracket: frontier budget exhausted at length %d", length)
    else:
        nrm = norm or entry_sum_norm
        lengths = n_max if norm is None else (norm_lengths or 1)
        level = [((), np.eye(d))]
        for length in range(1, lengths + 1):
            level = [(s + (i,), p @ mats[i]) for s, p in level for i in range(k)]
            upper = min(upper, max(nrm(p) for _, p in level) ** (1.0 / length))

    # depth-first over index sequences, reusing prefix products
    stack: list[tuple[tuple[int, ...], np.ndarray]] = [((i,), mats[i]) for i in reversed(range(k))]
    try:
        while stack:
            seq, prod = stack.pop()
            count += 1
            if count > budget:
                raise BudgetExhausted
            if _is_necklace(seq):
                rho = spectral_radius(prod) ** (1.0 / len(seq))
                # ties within rounding go to the shorter product
                if rho > lower * (1 + 1e-10) or (
                    rho >= lower * (1 - 1e-10) and len(seq) < len(best)
                ):
                    lower, best = rho, seq
            if len(seq) < n_max:
                for i in reversed(range(k)):
                    stack.append((seq + (i,), prod @ mats[i]))
    except BudgetExhausted:
        partial = True
        log.info("product_bracket: budget %d exhausted", budget)
    rows.append({"products": count, "n_max": n_max})
    return JsrBracket(lower, max(upper, lower), best, partial=partial, log=rows)


def product_matrix(fam: TransferFamily | MatrixList, product: Sequence[int]) -> np.ndarray:
    mats = _matrices(fam)
    p = np.eye(mats[0].shape[0])
    for i in product:
        p = p @ mats[i]
    return p


# ---------------------------------------------------------------- certification


@dataclass(frozen=True)
class Certificate:
    """Numerical proof that ``lambda_`` is the joint spectral radius.

    Every matrix divided by ``lambda_`` maps every vertex of ``polytope``
    back into the polytope, up to ``margin`` (the largest observed excess
    of the Minkowski norm over 1). Together with ``lambda_`` being
    attained by ``product`` this pins the joint spectral radius.
    """

    lambda_: float
    product: tuple[int, ...]
    polytope: SymPolytope
    margin: float
    steps: int
    slack: float = CERT_SLACK

    @property
    def capacity(self) -> float:
        return math.log2(self.lambda_)

    def to_json(self) -> str:
        return json.dumps(
            {
                "lambda": self.lambda_,
                "product": list(self.product),
                "vertices": self.polytope.vertices.tolist(),
                "margin": self.margin,
                "steps": self.steps,
                "slack": self.slack,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> Certificate:
        data = json.loads(text)
        return cls(
            data["lambda"],
            tuple(data["product"]),
            SymPolytope(np.array(data["vertices"])),
            data["margin"],
            data["steps"],
            data["slack"],
        )


def _grow_invariant(
    mats: list[np.ndarray],
    seeds: list[np.ndarray],
    scale: float,
    step_cap: int,
    slack: float,
    trace: list[dict],
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> tuple[np.ndarray | None, int]:
    """Grow conv{±seeds} under the scaled matrices until it is invariant.

    Returns (vertices, steps) on success, (None, steps) when ``step_cap``
    rounds pass with new vertices still appearing or the body needs more
    than ``max_vertices`` vertex pairs.
    """
    verts = prune_vertices(np.array(seeds), slack)
    fresh = list(verts)
    for step in range(1, step_cap + 1):
        if len(fresh) * len(mats) > 2 * max_vertices:
            # too many images to test: the body is not settling
            return None, step
        candidates = []
        for w in fresh:
            for a in mats:
                x = a @ w / scale
                if minkowski_norm(x, verts).value > 1.0 + slack:
                    candidates.append(x)
        if not candidates:
            trace.append({"step": step, "vertices": len(verts), "new": 0})
            return verts, step
        # drop candidates already covered by each other before merging
        cand = prune_vertices(np.array(candidates), slack)
        merged = prune_vertices(np.vstack([verts, cand]), slack)
        kept = {tuple(v) for v in merged}
        fresh = [c for c in cand if tuple(c) in kept]
        verts = merged
        trace.append(
            {
                "step": step,
                "vertices": len(verts),
                "new": len(fresh),
                "max_vertex_norm": float(np.max(np.linalg.norm(verts, axis=1))),
            }
        )
        log.debug("grow step %d: %d vertices, %d new", step, len(verts), len(fresh))
        if len(verts) > max_vertices:
            return None, step
    return None, step_cap


def _complete_flat(
    mats: list[np.ndarray],
    verts: np.ndarray,
    scale: float,
    step_cap: int,
    slack: float,
    trace: list[dict],
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> tuple[np.ndarray | None, int]:
    d = verts.shape[1]
    norms = [
        minkowski_norm(a[:, j] / scale, verts).value for a in mats for j in range(d)
    ]
    finite = [x for x in norms if math.isfinite(x)]
    t = 0.5 / max(max(finite, default=1.0), 1.0)
    seeds = list(verts) + [t * e for e in np.eye(d)]
    grown, steps = _grow_invariant(
        mats, seeds, scale, max(step_cap, 1), slack, trace, max_vertices
    )
    if grown is None or np.linalg.matrix_rank(grown) < d:
        return None, steps
    return grown, steps


def _max_excess(mats: list[np.ndarray], p: SymPolytope, scale: float) -> float:
    worst = 0.0
    for a in mats:
        for w in p.vertices:
            worst = max(worst, minkowski_norm(a @ w / scale, p.vertices).value - 1.0)
    return worst


def certify_candidate(
    fam: TransferFamily | MatrixList,
    product: Sequence[int],
    k_max: int = 40,
    slack: float = CERT_SLACK,
    trace: list[dict] | None = None,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> Certificate | None:
    """Try to prove that ``product`` attains the joint spectral radius.

    Starting from the leading eigenvector ``v`` of the product, the body
    ``conv{±(A/lambda)^j v}`` is grown one application round at a time.
    When a round adds nothing, the body is invariant under every
    ``A_i/lambda``; if it is also full-dimensional its Minkowski norm is
    extremal and the joint spectral radius equals
    ``lambda = rho(product)**(1/len(product))``.

    Returns None when no invariant body appears within ``k_max`` rounds
    and ``max_vertices`` vertex pairs, or the invariant body is flat. Neither outcome refutes the candidate.
    """
    mats = _matrices(fam)
    product = tuple(product)
    pi = product_matrix(mats, product)
    top, v = leading_eigenvector(pi)
    lam = abs(top) ** (1.0 / len(product))
    trace = [] if trace is None else trace
    verts, steps = _grow_invariant(mats, [v], lam, k_max, slack, trace, max_vertices)
    if verts is None:
        log.info("certify %s: no invariant polytope within %d steps", product, k_max)
        return None
    poly = SymPolytope(verts)
    if not poly.full_dimensional():
        # The orbit spans a proper invariant subspace. Small multiples of the
        # basis vectors complete the body provided their images get absorbed.
        verts, more = _complete_flat(
            mats, verts, lam, k_max - steps, slack, trace, max_vertices
        )
        steps += more
        if verts is None:
            log.info("certify %s: invariant polytope is flat", product)
            return None
        poly = SymPolytope(verts)
    margin = _max_excess(mats, poly, lam)
    if margin > slack:
        return None
    return Certificate(lam, product, poly, max(margin, 0.0), steps, slack)


def verify_certificate(
    fam: TransferFamily | MatrixList, cert: Certificate, slack: float | None = None
) -> bool:
    """Independent re-check of a certificate.

    Uses an interior-point solve (the search used dual simplex) and then
    validates the returned combination coefficients directly: they must
    reproduce each image to ``WITNESS_TOL`` with l1 mass at most
    ``1 + slack``. The eigenvalue claim is re-derived as well.
    """
    slack = cert.slack if slack is None else slack
    mats = _matrices(fam)
    verts = cert.polytope.vertices
    if np.linalg.matrix_rank(verts) != verts.shape[1]:
        return False
    rho = spectral_radius(product_matrix(mats, cert.product)) ** (1.0 / len(cert.product))
    if not math.isclose(rho, cert.lambda_, rel_tol=1e-10):
        return False
    for a in mats:
        for w in verts:
            x = a @ w / cert.lambda_
            sol = minkowski_norm(x, verts, method="highs-ipm")
            if sol.coeffs is None:
                return False
            resid = np.max(np.abs(verts.T @ sol.coeffs - x))
            if resid > WITNESS_TOL * max(1.0, np.max(np.abs(x))):
                return False
            if np.abs(sol.coeffs).sum() > 1.0 + slack:
                return False
    return True


# ---------------------------------------------------------------- polytope iteration


def polytope_iterate(
    fam: TransferFamily | MatrixList,
    eps: float,
    step_cap: int = 60,
    n_max: int | None = None,
    slack: float = CERT_SLACK,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> JsrBracket:
    """Bracket the joint spectral radius to absolute width ``eps``.

    1. Products up to ``n_max`` give a lower bound and a candidate.
    2. The candidate is offered to ``certify_candidate``; success closes
       the bracket.
    3. Otherwise the cross-polytope is grown under ``A_i/mu`` with the
       trial scale ``mu = lower + eps/2``. Each round's body contains the
       cross-polytope, so ``max_i ||A_i||`` in its norm is a valid upper
       bound; once the body is invariant the bound is ``mu`` itself.

    Stops at width ``<= eps``, on certification, or after ``step_cap``
    rounds or ``max_vertices`` vertex pairs (result flagged ``partial``).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    mats = _matrices(fam)
    if n_max is None:
        n_max = max(1, min(10, int(math.log(2e5) / math.log(max(len(mats), 2)))))
    pb = product_bracket(mats, n_max)
    lower, best = pb.lower, pb.best_product
    trace: list[dict] = []
    try:
        cert = certify_candidate(
            mats, best, k_max=step_cap, slack=slack, trace=trace, max_vertices=max_vertices
        )
    except NumericalError as exc:
        log.info("candidate %s not certifiable: %s", best, exc)
        cert = None
    if cert is not None:
        upper = cert.lambda_ * (1.0 + max(cert.margin, 0.0))
        return JsrBracket(cert.lambda_, upper, best, certified=True, log=trace)

    return _grow_cross(mats, pb, eps, step_cap, slack, max_vertices, trace)


def _grow_cross(
    mats: list[np.ndarray],
    pb: JsrBracket,
    eps: float,
    step_cap: int,
    slack: float,
    max_vertices: int,
    trace: list[dict],
) -> JsrBracket:
    """Step 3 of ``polytope_iterate``, starting from the product bracket ``pb``."""
    lower, upper, best = pb.lower, pb.upper, pb.best_product
    mu = lower + eps / 2
    verts = np.eye(mats[0].shape[0])
    fresh = list(verts)
    partial = True
    for step in range(1, step_cap + 1):
        if len(fresh) * len(mats) > 2 * max_vertices:
            break
        # Images of older vertices were absorbed in earlier rounds and the
        # body only grows, so the fresh images decide the operator norm.
        images = [a @ w / mu for w in fresh for a in mats]
        norms = [minkowski_norm(x, verts).value for x in images]
        worst = max(norms)
        upper = min(upper, mu * max(worst, 1.0 + slack))
        trace.append(
            {"step": step, "vertices": len(verts), "upper": upper,
             "max_vertex_norm": float(np.max(np.linalg.norm(verts, axis=1)))}
        )
        if upper - lower <= eps:
            partial = False
            break
        candidates = [x for x, v in zip(images, norms) if v > 1.0 + slack]
        if not candidates:
            break
        cand = prune_vertices(np.array(candidates), slack)
        merged = prune_vertices(np.vstack([verts, cand]), slack)
        kept = {tuple(v) for v in merged}
        fresh = [c for c in cand if tuple(c) in kept]
        verts = merged
        if len(verts) > max_vertices:
            break
    return JsrBracket(lower, max(upper, lower), best, partial=partial, log=trace)


# ---------------------------------------------------------------- capacity pipeline


@dataclass
class CapacityResult:
    """Capacity of a forbidden set in bits per symbol.

    ``lower``/``upper`` bracket the capacity; when ``certified`` they
    coincide up to the certificate margin and ``value`` is the exact
    capacity. ``sandwich`` is an independent bracket from a brute-force
    ``delta_n``, or None when that was skipped or over budget.
    """

    patterns: PatternSet
    mode: str
    lower: float
    upper: float
    certified: bool
    value: float | None
    method: str
    bracket: JsrBracket | None = None
    certificate: Certificate | None = None
    family_size: int = 0
    sandwich: CapacityBracket | None = None

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _log2_bracket(jb: JsrBracket) -> tuple[float, float]:
    lo = math.log2(jb.lower) if jb.lower > 0 else 0.0
    hi = math.log2(jb.upper) if jb.upper > 0 else 0.0
    return max(0.0, lo), min(1.0, max(hi, lo))


def brute_bracket(d: PatternSet, n: int, budget: int = 10**6) -> CapacityBracket | None:
    """Sandwich bracket from an exact brute-force ``delta_n``; None if over budget."""
    n = max(n, d.r1 + d.r2)
    try:
        delta, _ = max_code(n, d, budget=budget)
    except BudgetExhausted:
        return None
    return theorem1_bracket(n, delta, d)


def capacity(
    d: PatternSet,
    mode: str = "certify",
    eps: float = 1e-8,
    n_max: int | None = None,
    step_cap: int = 60,
    brute_n: int | None = 8,
    brute_budget: int = 10**6,
    product_budget: int = DEFAULT_PRODUCT_BUDGET,
) -> CapacityResult:
    """Capacity via the joint spectral radius of the transfer family.

    ``mode="certify"`` builds the family, finds the best short product and
    tries to prove it extremal; if that fails the result falls back to a
    bracket of width ``eps``. ``mode="bracket"`` asks for a bracket whose
    width in capacity units is at most ``eps``; certification, when it
    happens on the way, closes it completely.

    Sets with zero capacity (decided by the positivity automaton) short-cut
    to the exact value 0.
    """
    if mode not in ("certify", "bracket"):
        raise ValueError(f"unknown mode {mode!r}")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if d.extended:
        raise PatternError("extended set: expand it first")
    if d.has_all_zero_pattern():
        raise ConstructionError("sets with an all-zero pattern have no transfer family")
    sandwich = brute_bracket(d, brute_n, brute_budget) if brute_n else None

    if not decide_positive(d):
        return CapacityResult(
            d, mode, 0.0, 0.0, True, 0.0, "positivity", sandwich=sandwich
        )

    fam = build_sigma(d)
    mats = _matrices(fam)
    if n_max is None:
        n_max = max(1, min(8, int(math.log(2e4) / math.log(max(len(mats), 2)))))
    pb = product_bracket(mats, n_max, budget=product_budget)
    trace: list[dict] = []
    cert = None
    try:
        cert = certify_candidate(mats, pb.best_product, k_max=step_cap, trace=trace)
    except NumericalError as exc:
        log.info("capacity %s: candidate not certifiable: %s", d, exc)

    if cert is not None:
        # the certified value must sit inside the product bracket
        if not pb.lower * (1 - 1e-9) <= cert.lambda_ <= pb.upper * (1 + 1e-9):
            raise InvariantViolation(
                f"certified {cert.lambda_} outside product bracket [{pb.lower}, {pb.upper}]"
            )
        value = cert.capacity
        upper = math.log2(cert.lambda_ * (1.0 + cert.margin))
        # widen outward so the exact value survives the rounding of log2
        lo, hi = max(0.0, value - ROUND_SLACK), min(1.0, max(value, upper) + ROUND_SLACK)
        return CapacityResult(
            d, mode, lo, hi, True, value, "invariant polytope",
            bracket=pb, certificate=cert, family_size=len(mats), sandwich=sandwich,
        )

    eps_jsr = max(pb.lower, 1.0) * (2.0**eps - 1.0)
    jb = _grow_cross(mats, pb, eps_jsr, step_cap, CERT_SLACK, DEFAULT_MAX_VERTICES, trace)
    lo, hi = _log2_bracket(jb)
    lo, hi = max(0.0, lo - ROUND_SLACK), min(1.0, hi + ROUND_SLACK)
    if sandwich is not None:
        lo, hi = max(lo, sandwich.lower), min(hi, sandwich.upper)
    if lo > hi + 1e-9:
        raise InvariantViolation(f"empty capacity bracket [{lo}, {hi}]")
    return CapacityResult(
        d, mode, lo, max(lo, hi), jb.certified, lo if jb.certified else None,
        "polytope iteration", bracket=jb, family_size=len(mats), sandwich=sandwich,
    )
