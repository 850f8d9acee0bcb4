"""Minimum-norm convex combination of the vertices.

The projection is the point ``sum_i a_i z_i`` minimizing the quadratic form
``<a, B a>`` over the standard simplex, where ``B`` is the Gram matrix of the
vertices.  A weight vector is optimal exactly when every row satisfies
``(B a)_i >= <a, B a>``; the signed slack of that criterion is the
``optimality_gap`` exposed here.

The solver is Frank-Wolfe with away steps and exact line search.  The linear
minimization oracle over the simplex is the lowest-index vertex minimizing
``(B a)_i``, which coincides with the support-function argmin at the current
point.  A terminal active-set polish closes the gap to near machine
precision so that independently computed routes agree tightly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_TOLERANCES,
    Polyhedron,
    ToleranceConfig,
    gram_matrix,
    refine_simplex_minimizer,
)
from .errors import MaxIterExceeded, SimplexViolation

__all__ = ["SimplexSolution", "phi", "optimality_gap", "solve_wolfe"]


@dataclass(frozen=True)
class SimplexSolution:
    """Optimal convex weights and the point they combine to."""

    alpha: np.ndarray
    rho: np.ndarray
    phi: float
    gap: float
    iterations: int
    origin_inside: bool
    trace: tuple[float, ...] | None = None


def _check_simplex(alpha, m: int, feas_tol: float) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (m,):
        raise SimplexViolation(f"weight vector must have length {m}")
    if alpha.min() < -feas_tol or abs(alpha.sum() - 1.0) > feas_tol:
        raise SimplexViolation(
            f"weights off the simplex: min {alpha.min():.3e}, "
            f"sum deviation {alpha.sum() - 1.0:.3e}"
        )
    return alpha


def phi(P: Polyhedron, alpha, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """Quadratic form ``<alpha, B alpha>``, the squared norm of the combination."""
    alpha = _check_simplex(alpha, P.m, cfg.feas_tol)
    B = gram_matrix(P).B
    return float(alpha @ B @ alpha)


def optimality_gap(
    P: Polyhedron, alpha, cfg: ToleranceConfig = DEFAULT_TOLERANCES
) -> float:
    """Signed slack ``<alpha, B alpha> - min_i (B alpha)_i``.

    Nonpositive values certify optimality of ``alpha``; callers typically
    assert the returned value is at most ``opt_tol``.
    """
    alpha = _check_simplex(alpha, P.m, cfg.feas_tol)
    B = gram_matrix(P).B
    w = B @ alpha
    return float(alpha @ w - w.min())


def solve_wolfe(
    P: Polyhedron,
    cfg: ToleranceConfig = DEFAULT_TOLERANCES,
    start=None,
    record_trace: bool = False,
) -> SimplexSolution:
    """Minimize ``<a, B a>`` over the simplex and recover the projection.

    Parameters
    ----------
    P : Polyhedron
        Problem instance.
    cfg : ToleranceConfig
        ``opt_tol`` is the stopping contract on the optimality gap;
        ``zero_tol`` flags origin membership when the optimum is ~0.
    start : array, optional
        Initial weights (defaults to uniform).  Exposed so tests can verify
        that the recovered point is start-independent even when the optimal
        weights are not unique.
    record_trace : bool
        Attach the per-iteration objective values as ``solution.trace``.

    Raises
    ------
    MaxIterExceeded
        If the gap contract cannot be met; carries the best iterate.
    """
    B = gram_matrix(P).B
    m = P.m
    if start is None:
        alpha = np.full(m, 1.0 / m)
    else:
        alpha = _check_simplex(start, m, cfg.feas_tol).copy()
        alpha = np.maximum(alpha, 0.0)
        alpha /= alpha.sum()

    trace: list[float] = []
    iterations = 0
    # The first-order phase only needs to land in the optimal basin; the
    # facial polish below closes the remaining gap to near machine precision
    # far faster than Frank-Wolfe's tail ever would, and it terminates
    # finitely from any simplex point, so the phase budget is modest.
    gap_stop = max(cfg.opt_tol, 1e-6 * (1.0 + float(np.abs(B).max())))
    phase_budget = min(cfg.max_iter, 30 * m + 200)
    for iterations in range(1, phase_budget + 1):
        w = B @ alpha
        phi_val = float(alpha @ w)
        if record_trace:
            trace.append(phi_val)
        s = int(np.argmin(w))
        gap_fw = phi_val - float(w[s])
        if gap_fw <= gap_stop:
            break

        support = np.flatnonzero(alpha > 0)
        v = int(support[np.argmax(w[support])])
        gap_away = float(w[v]) - phi_val

        if gap_fw >= gap_away:
            # Toward step: d = e_s - alpha.
            d_w = float(w[s]) - phi_val
            d_Bd = float(B[s, s]) - 2.0 * float(w[s]) + phi_val
            step_max = 1.0
            toward = True
        else:
            # Away step: d = alpha - e_v, feasible until alpha_v hits zero.
            d_w = phi_val - float(w[v])
            d_Bd = phi_val - 2.0 * float(w[v]) + float(B[v, v])
            a_v = float(alpha[v])
            step_max = a_v / (1.0 - a_v) if a_v < 1.0 else 0.0
            toward = False

        if d_Bd > 0.0:
            step = min(max(-d_w / d_Bd, 0.0), step_max)
        else:
            step = step_max

        if toward:
            alpha *= 1.0 - step
            alpha[s] += step
        else:
            alpha *= 1.0 + step
            alpha[v] -= step
            if step == step_max:
                alpha[v] = 0.0  # drop step: remove the away vertex exactly
        np.maximum(alpha, 0.0, out=alpha)
        alpha /= alpha.sum()

    # Active-set polish: the first-order loop certifies gap <= opt_tol, which
    # only bounds the point error by sqrt(2 * opt_tol); the facial solve
    # tightens the iterate to near machine precision.
    alpha, polish_steps = refine_simplex_minimizer(B, alpha)
    iterations += polish_steps

    w = B @ alpha
    phi_val = float(alpha @ w)
    gap = phi_val - float(w.min())
    if record_trace:
        trace.append(phi_val)
    if gap > cfg.opt_tol:
        raise MaxIterExceeded(
            f"optimality gap {gap:.3e} above {cfg.opt_tol:.1e} "
            f"after {iterations} iterations",
            best=alpha,
            residual=gap,
            iterations=iterations,
        )

    # Clamp fuzz below zero and renormalize before reporting.
    alpha = np.maximum(alpha, 0.0)
    alpha /= alpha.sum()
    rho = alpha @ P.vertices
    phi_val = float(alpha @ (B @ alpha))
    return SimplexSolution(
        alpha=alpha,
        rho=rho,
        phi=phi_val,
        gap=gap,
        iterations=iterations,
        origin_inside=phi_val <= cfg.zero_tol,
        trace=tuple(trace) if record_trace else None,
    )
