"""Certificates, origin-membership consensus, and the brute-force oracle.

Every route's answer is validated against the same optimality criterion: the
vertex residuals ``<z_i - rho, rho>`` must all be nonnegative, equivalently
``rho`` must lie in the ball-intersection set of ``core.in_omega``.  A hull
witness (convex weights reproducing ``rho``) is checked when available.

Four independent characterizations decide whether the hull contains the
origin; they are equivalent theorems, so a split vote is always surfaced as
an error, never resolved silently.  The reference oracle is deliberately
low-tech (closed forms for up to three vertices, pure grid search for four)
so that it shares no machinery with the routes it arbitrates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_TOLERANCES,
    Polyhedron,
    ProjectionResult,
    Route,
    ToleranceConfig,
    projection_result,
    vi_residuals,
)
from .errors import (
    ConflictingCharacterizations,
    OracleScaleExceeded,
    PpocpError,
    ZeroVector,
)
from .lcp import LcpStatus, LcpVariant, build_lcp, extract_projection, lemke_solve
from .maximin import solve_maximin
from .nnls import project_via_nnls
from .simplex_qp import solve_wolfe
from .support_qp import DualStatus, solve_dual

__all__ = [
    "CheckRecord",
    "Certificate",
    "ZeroMembershipVotes",
    "RouteEntry",
    "ConsensusReport",
    "reference_projection",
    "check_optimality",
    "detect_zero_membership",
    "cross_check",
]


@dataclass(frozen=True)
class CheckRecord:
    name: str
    passed: bool
    residual: float


@dataclass(frozen=True)
class Certificate:
    """Outcome of the optimality checks for one candidate projection."""

    rho: np.ndarray
    vi_min: float
    alpha_witness: np.ndarray | None
    zero_inside: bool
    checks: tuple[CheckRecord, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


@dataclass(frozen=True)
class ZeroMembershipVotes:
    """One boolean per characterization of ``origin inside the hull``."""

    wolfe_inside: bool
    dual_inside: bool
    maximin_inside: bool
    lcp_inside: bool

    @property
    def unanimous(self) -> bool:
        votes = {self.wolfe_inside, self.dual_inside, self.maximin_inside, self.lcp_inside}
        return len(votes) == 1

    @property
    def inside(self) -> bool:
        if not self.unanimous:
            raise ConflictingCharacterizations(
                "origin-membership characterizations disagree", votes=self
            )
        return self.wolfe_inside


@dataclass(frozen=True)
class RouteEntry:
    status: str  # "ok", "not-applicable", or "error"
    result: ProjectionResult | None = None
    error: str | None = None


@dataclass(frozen=True)
class ConsensusReport:
    entries: dict[str, RouteEntry]
    pairwise_max_deviation: float
    votes: dict[str, bool]
    verdict: str  # "agree" or "conflict"

    @property
    def rho(self) -> np.ndarray | None:
        for entry in self.entries.values():
            if entry.status == "ok":
                return entry.result.rho
        return None


def _project_segment(a, b):
    d = b - a
    dd = float(d @ d)
    if dd == 0.0:
        return a.copy()
    t = min(max(-float(a @ d) / dd, 0.0), 1.0)
    return a + t * d


def _project_triangle(z):
    # Affine-hull least squares, then barycentric feasibility; edges cover
    # the infeasible (and any degenerate) cases.
    V = np.column_stack([z[1] - z[0], z[2] - z[0]])
    s, *_ = np.linalg.lstsq(V, -z[0], rcond=None)
    candidates = []
    bary = np.array([1.0 - s[0] - s[1], s[0], s[1]])
    if bary.min() >= -1e-12:
        candidates.append(z[0] + V @ s)
    for i in range(3):
        for j in range(i + 1, 3):
            candidates.append(_project_segment(z[i], z[j]))
    norms = [float(c @ c) for c in candidates]
    return candidates[int(np.argmin(norms))]


def _project_enumerate(z):
    """Exact subset enumeration: project onto every face's affine hull.

    For each vertex subset, project the origin onto its affine hull by least
    squares and keep the candidate when the barycentric weights are
    nonnegative.  The true projection lies on some face and is a nonnegative
    combination of an affinely independent subset, whose (then unique)
    weights the least-squares solve reproduces, so it is always among the
    candidates.  Grid search at any fixed step cannot reach the residual
    tolerances the certificates demand, which is why the four-vertex case
    enumerates too.
    """
    from itertools import combinations

    m = z.shape[0]
    best = None
    best_norm = np.inf
    evaluations = 0
    for size in range(1, m + 1):
        for subset in combinations(range(m), size):
            zs = z[list(subset)]
            if size == 1:
                cand = zs[0]
            else:
                base = zs[0]
                V = (zs[1:] - base).T
                s, *_ = np.linalg.lstsq(V, -base, rcond=None)
                bary = np.concatenate([[1.0 - s.sum()], s])
                if bary.min() < -1e-12:
                    continue
                cand = base + V @ s
            evaluations += 1
            norm_sq = float(cand @ cand)
            if norm_sq < best_norm:
                best_norm = norm_sq
                best = cand
    return best, evaluations


def reference_projection(
    P: Polyhedron, cfg: ToleranceConfig = DEFAULT_TOLERANCES
) -> ProjectionResult:
    """Independent projection for tiny instances.

    Exact case analysis throughout: vertex, segment, and triangle (affine
    hull plus edge recursion) have dedicated closed forms; four vertices go
    through complete face enumeration.  No solver machinery is shared with
    the routes this oracle arbitrates.
    """
    z = P.vertices
    if P.m == 1:
        return projection_result(P, z[0], Route.ORACLE, 1, cfg)
    if P.m == 2:
        return projection_result(P, _project_segment(z[0], z[1]), Route.ORACLE, 1, cfg)
    if P.m == 3:
        return projection_result(P, _project_triangle(z), Route.ORACLE, 1, cfg)
    if P.m == 4:
        rho, evaluations = _project_enumerate(z)
        return projection_result(P, rho, Route.ORACLE, evaluations, cfg)
    raise OracleScaleExceeded(f"oracle handles at most 4 vertices, got {P.m}")


def check_optimality(
    P: Polyhedron,
    rho,
    alpha=None,
    cfg: ToleranceConfig = DEFAULT_TOLERANCES,
) -> Certificate:
    """Evaluate the optimality criterion at a candidate point.

    Failures are recorded in the certificate, never raised: callers decide
    what a failed check means in context.
    """
    rho = np.asarray(rho, dtype=float)
    checks = []

    residuals = vi_residuals(P, rho)
    vi_min = float(residuals.min())
    checks.append(CheckRecord("vi-min", vi_min >= -cfg.opt_tol, vi_min))

    # Ball form of the membership test for the set containing every valid
    # projection: excess over each ball's radius must be ~nonpositive.
    centers = P.vertices / 2.0
    radii = np.linalg.norm(P.vertices, axis=1) / 2.0
    excess = float((np.linalg.norm(rho - centers, axis=1) - radii).max())
    checks.append(CheckRecord("omega-ball", excess <= cfg.opt_tol, excess))

    witness = None
    if alpha is not None:
        witness = np.asarray(alpha, dtype=float)
        simplex_dev = max(
            float(abs(witness.sum() - 1.0)), float(max(-witness.min(), 0.0))
        )
        combo_dev = float(np.linalg.norm(witness @ P.vertices - rho))
        ok = (
            simplex_dev <= cfg.feas_tol
            and combo_dev <= cfg.feas_tol * (1.0 + float(np.linalg.norm(rho)))
        )
        checks.append(CheckRecord("hull-witness", ok, max(simplex_dev, combo_dev)))

    return Certificate(
        rho=rho,
        vi_min=vi_min,
        alpha_witness=witness,
        zero_inside=float(np.linalg.norm(rho)) <= cfg.zero_tol,
        checks=tuple(checks),
    )


def detect_zero_membership(
    P: Polyhedron, cfg: ToleranceConfig = DEFAULT_TOLERANCES
) -> ZeroMembershipVotes:
    """Poll the four origin-membership characterizations.

    Votes: the simplex QP reaching objective ~0, the dual diverging, the
    maximin value ~0, and ray termination of the split-form complementarity
    problem.  Raises ConflictingCharacterizations on a split vote, which is
    always a numerical-tolerance failure worth surfacing.
    """
    votes = ZeroMembershipVotes(
        wolfe_inside=solve_wolfe(P, cfg).origin_inside,
        dual_inside=solve_dual(P, cfg).status is DualStatus.UNBOUNDED_BELOW,
        maximin_inside=solve_maximin(P, cfg).origin_inside,
        lcp_inside=lemke_solve(build_lcp(P, LcpVariant.PRIMAL_SPLIT), cfg).status
        is LcpStatus.RAY_TERMINATION,
    )
    if not votes.unanimous:
        raise ConflictingCharacterizations(
            f"origin-membership characterizations disagree: {votes}", votes=votes
        )
    return votes


def _run_wolfe(P, cfg):
    sol = solve_wolfe(P, cfg)
    return projection_result(
        P, sol.rho, Route.WOLFE, sol.iterations, cfg, origin_inside=sol.origin_inside
    )


def _run_dual(P, cfg):
    out = solve_dual(P, cfg)
    if out.status is DualStatus.UNBOUNDED_BELOW:
        return projection_result(
            P, np.zeros(P.n), Route.DUAL, out.iterations, cfg, origin_inside=True
        )
    return projection_result(
        P, out.rho, Route.DUAL, out.iterations, cfg, origin_inside=False
    )


def _run_maximin(P, cfg):
    sol = solve_maximin(P, cfg)
    return projection_result(
        P, sol.rho, Route.MAXIMIN, sol.iterations, cfg, origin_inside=sol.origin_inside
    )


def _run_lcp(variant):
    def runner(P, cfg):
        instance = build_lcp(P, variant)
        return extract_projection(P, instance, lemke_solve(instance, cfg), cfg)

    return runner


def _run_oracle(P, cfg):
    return reference_projection(P, cfg)


_ROUTE_RUNNERS = {
    "wolfe": _run_wolfe,
    "dual": _run_dual,
    "maximin": _run_maximin,
    "lcp-primal": _run_lcp(LcpVariant.PRIMAL_SPLIT),
    "lcp-wolfe": _run_lcp(LcpVariant.WOLFE_KKT),
    "lcp-dual": _run_lcp(LcpVariant.DUAL_ORTHANT),
}


def cross_check(
    P: Polyhedron, cfg: ToleranceConfig = DEFAULT_TOLERANCES
) -> ConsensusReport:
    """Run every applicable route and compare the answers.

    Per-route errors are captured in the report rather than aborting the
    remaining routes.  The verdict is ``agree`` only when all successful
    routes match pairwise within ``1e-6 * (1 + max distance)`` and their
    origin-membership votes coincide.
    """
    entries: dict[str, RouteEntry] = {}
    for name, runner in _ROUTE_RUNNERS.items():
        try:
            entries[name] = RouteEntry(status="ok", result=runner(P, cfg))
        except PpocpError as err:
            entries[name] = RouteEntry(status="error", error=str(err))

    try:
        nnls_result = project_via_nnls(P, cfg)
        if nnls_result is None:
            entries["nnls"] = RouteEntry(status="not-applicable")
        else:
            entries["nnls"] = RouteEntry(status="ok", result=nnls_result)
    except (ZeroVector, PpocpError) as err:
        entries["nnls"] = RouteEntry(status="error", error=str(err))

    if P.m <= 4:
        try:
            entries["oracle"] = RouteEntry(status="ok", result=reference_projection(P, cfg))
        except PpocpError as err:
            entries["oracle"] = RouteEntry(status="error", error=str(err))

    good = {name: e.result for name, e in entries.items() if e.status == "ok"}
    max_dev = 0.0
    names = list(good)
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            dev = float(np.linalg.norm(good[names[i]].rho - good[names[j]].rho))
            max_dev = max(max_dev, dev)

    votes = {name: result.origin_inside for name, result in good.items()}
    max_distance = max((r.distance for r in good.values()), default=0.0)
    agree = (
        bool(good)
        and all(e.status != "error" for e in entries.values())
        and max_dev <= 1e-6 * (1.0 + max_distance)
        and len(set(votes.values())) <= 1
    )
    return ConsensusReport(
        entries=entries,
        pairwise_max_deviation=max_dev,
        votes=votes,
        verdict="agree" if agree else "conflict",
    )
