"""Instance representation and the shared computations every solver route uses.

A problem instance is a polytope given as the convex hull of finitely many
vertices ``z_1..z_m`` in R^n; the task everywhere in this package is the
Euclidean projection of the origin onto that hull.  This module owns the
vertex matrix and its derived objects (constraint rows ``-z_i``, Gram matrix
of vertex inner products), the membership predicates for the two dual-side
feasible sets, and the variational-inequality residuals used to certify
every route's answer.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InternalInconsistency

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOLERANCES",
    "Route",
    "Polyhedron",
    "ConstraintSystem",
    "GramMatrix",
    "ProjectionResult",
    "constraint_matrix",
    "gram_matrix",
    "support_value",
    "vi_residuals",
    "in_omega",
    "in_D",
    "translate",
    "projection_result",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical thresholds shared by all routes.

    feas_tol bounds constraint violations, opt_tol bounds optimality
    residuals, zero_tol decides when the origin is declared inside the hull,
    and unbounded_cap is the iterate-norm ceiling used to flag a diverging
    dual.  Thresholds are absolute, so callers working with very large or
    very small vertex coordinates should scale them accordingly.
    """

    feas_tol: float = 1e-9
    opt_tol: float = 1e-8
    zero_tol: float = 1e-8
    max_iter: int = 100_000
    unbounded_cap: float = 1e8

    def __post_init__(self):
        for name in ("feas_tol", "opt_tol", "zero_tol", "max_iter", "unbounded_cap"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


DEFAULT_TOLERANCES = ToleranceConfig()


class Route(enum.Enum):
    """Which formulation produced a projection."""

    WOLFE = "wolfe"
    DUAL = "dual"
    MAXIMIN = "maximin"
    LCP_PRIMAL = "lcp-primal"
    LCP_WOLFE = "lcp-wolfe"
    LCP_DUAL = "lcp-dual"
    NNLS = "nnls"
    ORACLE = "oracle"


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Polyhedron:
    """Convex hull of ``m`` vertices in R^n, stored as an (m, n) row matrix.

    Vertex order is preserved: row index ``i`` is a stable identifier used in
    every weight vector, residual vector and diagnostic across the package.
    Duplicate vertices are legal (the math tolerates them) but draw a warning.
    """

    vertices: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.vertices, dtype=float)
        if z.ndim != 2:
            raise ValueError(
                "vertices must be a 2-D array-like with one row per vertex"
            )
        if z.shape[0] < 1 or z.shape[1] < 1:
            raise ValueError("need at least one vertex of dimension at least one")
        if not np.all(np.isfinite(z)):
            raise ValueError("vertices must have finite coordinates")
        if np.unique(z, axis=0).shape[0] < z.shape[0]:
            warnings.warn("duplicate vertices kept as given", stacklevel=2)
        object.__setattr__(self, "vertices", _readonly(z))

    @property
    def m(self) -> int:
        return self.vertices.shape[0]

    @property
    def n(self) -> int:
        return self.vertices.shape[1]


@dataclass(frozen=True)
class ConstraintSystem:
    """Rows ``-z_i`` and the all-ones right-hand side of the halfspace system."""

    C: np.ndarray
    e: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "C", _readonly(self.C))
        object.__setattr__(self, "e", _readonly(self.e))


@dataclass(frozen=True)
class GramMatrix:
    """Matrix of pairwise vertex inner products; symmetric positive semidefinite."""

    B: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "B", _readonly(self.B))


@dataclass(frozen=True)
class ProjectionResult:
    """A route's answer: the projection, its norm, and certificate data."""

    rho: np.ndarray
    distance: float
    route: Route
    iterations: int
    vi_min: float
    origin_inside: bool = False

    def __post_init__(self):
        object.__setattr__(self, "rho", _readonly(self.rho))


def _vector(y, n: int, name: str = "y") -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape != (n,):
        raise ValueError(f"{name} must be a vector of dimension {n}")
    if not np.all(np.isfinite(y)):
        raise ValueError(f"{name} must be finite")
    return y


def constraint_matrix(P: Polyhedron) -> ConstraintSystem:
    """Halfspace data ``C`` (rows exactly ``-z_i``) and ones vector ``e``."""
    return ConstraintSystem(C=-P.vertices, e=np.ones(P.m))


def gram_matrix(P: Polyhedron) -> GramMatrix:
    """Gram matrix ``B[i, j] = <z_i, z_j>``, symmetrized by construction."""
    G = P.vertices @ P.vertices.T
    # Mirror the upper triangle so B == B.T bit for bit.
    B = np.triu(G) + np.triu(G, 1).T
    return GramMatrix(B=B)


def support_value(P: Polyhedron, c) -> tuple[float, int]:
    """Smallest vertex inner product ``min_i <c, z_i>`` and its vertex index.

    This is the support function of the hull in direction ``-c`` up to sign;
    the minimum over the whole hull is attained at a vertex, so scanning the
    vertex list is exact.  Ties resolve to the lowest index.
    """
    c = _vector(c, P.n, "c")
    values = P.vertices @ c
    idx = int(np.argmin(values))
    return float(values[idx]), idx


def vi_residuals(P: Polyhedron, y) -> np.ndarray:
    """Vertex residuals ``<z_i - y, y>`` of the variational inequality.

    ``y`` is the projection of the origin exactly when every entry is
    nonnegative; callers inspect the minimum entry.  The formula is applied
    literally per index so that the residual at ``y = z_j`` is an exact zero.
    """
    y = _vector(y, P.n)
    return (P.vertices - y) @ y


def in_omega(P: Polyhedron, y, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> bool:
    """Membership in ``{y : <z_i, y> >= ||y||^2 for all i}``.

    The set is equivalently the intersection of the balls of radius
    ``||z_i||/2`` centered at ``z_i/2``; both characterizations are evaluated
    and cross-checked.  Because one margin is ``feas_tol`` and the other is
    effectively ``feas_tol * ||z_i||``, the verdicts may legitimately split
    inside that band; a split outside it means a computation bug and raises.

    The halfspace verdict is the one returned.
    """
    y = _vector(y, P.n)
    z = P.vertices
    yy = float(y @ y)
    h = z @ y - yy
    half = h >= -cfg.feas_tol

    centers = z / 2.0
    radii = np.linalg.norm(z, axis=1) / 2.0
    dist_to_center = np.linalg.norm(y - centers, axis=1)
    ball = dist_to_center <= radii + cfg.feas_tol

    if not np.array_equal(half, ball):
        # -h_i = excess_i * (dist_i + r_i): the ball test thresholds -h_i at
        # feas_tol * (dist_i + r_i) while the halfspace test thresholds it at
        # feas_tol.  Disagreement is only admissible between those two values.
        den = dist_to_center + radii
        slack = 64.0 * np.finfo(float).eps * (1.0 + yy + (z * z).sum(axis=1))
        lo = np.minimum(cfg.feas_tol, cfg.feas_tol * den) - slack
        hi = np.maximum(cfg.feas_tol, cfg.feas_tol * den) + slack
        split = half != ball
        out_of_band = split & ~((-h >= lo) & (-h <= hi))
        if out_of_band.any():
            i = int(np.flatnonzero(out_of_band)[0])
            raise InternalInconsistency(
                f"halfspace and ball membership tests disagree at vertex {i}: "
                f"margin {h[i]:.3e}, ball excess {dist_to_center[i] - radii[i]:.3e}"
            )
    return bool(half.all())


def in_D(P: Polyhedron, y, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> bool:
    """Membership in ``{y : <z_i, y> >= 1 for all i}``."""
    y = _vector(y, P.n)
    return bool((P.vertices @ y >= 1.0 - cfg.feas_tol).all())


def translate(P: Polyhedron, p) -> Polyhedron:
    """Shift every vertex by ``-p``.

    Projecting an arbitrary point ``p`` onto the hull reduces to projecting
    the origin onto the shifted hull and adding ``p`` back.
    """
    p = _vector(p, P.n, "p")
    with warnings.catch_warnings():
        # Duplicates were already reported when P was built.
        warnings.simplefilter("ignore")
        return Polyhedron(P.vertices - p)


def projection_result(
    P: Polyhedron,
    rho,
    route: Route,
    iterations: int,
    cfg: ToleranceConfig = DEFAULT_TOLERANCES,
    origin_inside: bool | None = None,
) -> ProjectionResult:
    """Assemble a ProjectionResult, computing distance and the VI residual."""
    rho = _vector(rho, P.n, "rho")
    distance = float(np.linalg.norm(rho))
    vi_min = float(vi_residuals(P, rho).min())
    if origin_inside is None:
        origin_inside = distance <= cfg.zero_tol
    return ProjectionResult(
        rho=rho,
        distance=distance,
        route=route,
        iterations=iterations,
        vi_min=vi_min,
        origin_inside=bool(origin_inside),
    )


def affine_face_weights(B: np.ndarray, support: list[int]) -> np.ndarray:
    """Weights minimizing ``<w, B w>`` over ``sum w = 1`` on a vertex subset.

    Solves the stationarity system of the affine-hull problem by a least
    squares factorization, so a singular Gram block yields the minimum-norm
    weight vector deterministically.
    """
    k = len(support)
    K = np.zeros((k + 1, k + 1))
    K[:k, :k] = 2.0 * B[np.ix_(support, support)]
    K[:k, k] = -1.0
    K[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol, *_ = np.linalg.lstsq(K, rhs, rcond=None)
    return sol[:k]


def refine_simplex_minimizer(
    B: np.ndarray, alpha, tol: float | None = None
) -> tuple[np.ndarray, int]:
    """Polish a simplex point toward the exact minimizer of ``<a, B a>``.

    Active-set descent in the style of the classical minimum-norm-point
    schemes: solve the affine-hull problem on the current support, walk
    toward that solution without leaving the simplex (dropping coordinates
    that hit zero), and grow the support with the vertex most violating the
    global optimality margin.  The objective never increases and the iterate
    stays on the simplex.  Returns the polished weights and the number of
    inner steps taken.
    """
    m = B.shape[0]
    eps = np.finfo(float).eps
    if tol is None:
        tol = 64.0 * eps * (1.0 + float(np.abs(B).max()))
    x = np.maximum(np.asarray(alpha, dtype=float), 0.0)
    s = x.sum()
    x = x / s if s > 0 else np.full(m, 1.0 / m)
    support = np.flatnonzero(x > 1e-12).tolist()
    if not support:
        support = [int(np.argmin(np.diag(B)))]
        x = np.zeros(m)
        x[support[0]] = 1.0
    steps = 0
    for _ in range(4 * m + 8):
        for _ in range(m + 1):
            steps += 1
            lam = affine_face_weights(B, support)
            if lam.min() >= -1e-12:
                x = np.zeros(m)
                x[support] = np.maximum(lam, 0.0)
                x /= x.sum()
                break
            xs = x[support]
            neg = lam < 0
            theta = float(np.min(xs[neg] / (xs[neg] - lam[neg])))
            theta = min(max(theta, 0.0), 1.0)
            xs = (1.0 - theta) * xs + theta * lam
            x = np.zeros(m)
            x[support] = np.maximum(xs, 0.0)
            x /= x.sum()
            support = [i for i in support if x[i] > 1e-14]
            if not support:
                support = [int(np.argmin(np.diag(B)))]
                x = np.zeros(m)
                x[support[0]] = 1.0
        w = B @ x
        phi = float(x @ w)
        j = int(np.argmin(w))
        if phi - float(w[j]) <= tol or j in support:
            break
        support.append(j)
    return x, steps
