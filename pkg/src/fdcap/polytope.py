"""Origin-symmetric polytopes in vertex form and their Minkowski norms.

A polytope is stored as one representative ``w`` per pair ``±w``; the
body is ``conv{±w_j}``. Membership and norms reduce to the linear program

    minimise sum |c_j|  subject to  sum c_j w_j = x,

whose optimum is the Minkowski norm of ``x`` (infinite when ``x`` leaves
the span of the vertices).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from fdcap.errors import NumericalError

# equality residual accepted when re-checking LP witnesses
WITNESS_TOL = 1e-9


@dataclass(frozen=True)
class NormSolve:
    value: float
    coeffs: np.ndarray | None


def minkowski_norm(x: np.ndarray, vertices: np.ndarray, method: str = "highs-ds") -> NormSolve:
    """Gauge of ``x`` with respect to ``conv{±vertices}``.

    Returns ``inf`` with no coefficients when ``x`` is outside the span.
    Solver failures other than infeasibility raise NumericalError.
    """
    x = np.asarray(x, dtype=float)
    k, d = vertices.shape
    if x.shape != (d,):
        raise ValueError(f"dimension mismatch: point {x.shape}, vertices {vertices.shape}")
    if not np.any(x):
        return NormSolve(0.0, np.zeros(k))
    a_eq = np.hstack([vertices.T, -vertices.T])
    options = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}
    if method == "highs-ipm":
        options["ipm_optimality_tolerance"] = 1e-12
    res = linprog(
        np.ones(2 * k), A_eq=a_eq, b_eq=x, bounds=(0, None), method=method, options=options
    )
    if res.status == 2:
        return NormSolve(float("inf"), None)
    if res.status != 0:
        raise NumericalError(f"LP solver failed: {res.message}")
    coeffs = res.x[:k] - res.x[k:]
    return NormSolve(float(res.fun), coeffs)


@dataclass(frozen=True)
class SymPolytope:
    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or len(v) == 0:
            raise ValueError("need a non-empty (k, d) vertex array")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def cross(cls, dim: int, scale: float = 1.0) -> SymPolytope:
        """The ball of the l1 norm, ``sum |x_i| <= scale``."""
        return cls(scale * np.eye(dim))

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def __len__(self) -> int:
        return len(self.vertices)

    def full_dimensional(self) -> bool:
        return np.linalg.matrix_rank(self.vertices) == self.dim

    def norm(self, x: np.ndarray) -> float:
        return minkowski_norm(x, self.vertices).value

    def contains(self, x: np.ndarray, slack: float = 0.0) -> bool:
        return self.norm(x) <= 1.0 + slack

    def operator_norm(self, a: np.ndarray) -> float:
        """Induced norm of ``a``; attained at a vertex because the body is a polytope."""
        return max(self.norm(a @ w) for w in self.vertices)

    def pruned(self, slack: float = 0.0) -> SymPolytope:
        return SymPolytope(prune_vertices(self.vertices, slack))


def point_in_hull(x: np.ndarray, p: SymPolytope, slack: float = 0.0) -> bool:
    """True iff ``x = sum c_j v_j`` over signed vertices with ``sum |c_j| <= 1 + slack``."""
    return p.contains(x, slack)


def prune_vertices(vertices: np.ndarray, slack: float = 0.0) -> np.ndarray:
    """Drop every vertex lying in the symmetric hull of the remaining ones.

    Vertices are tested smallest-first against the current survivors.
    """
    vertices = np.asarray(vertices, dtype=float)
    keep = list(range(len(vertices)))
    order = np.argsort(np.linalg.norm(vertices, axis=1), kind="stable")
    for i in order:
        others = [j for j in keep if j != i]
        if not others:
            break
        if minkowski_norm(vertices[i], vertices[others]).value <= 1.0 + slack:
            keep.remove(i)
    return vertices[keep]
