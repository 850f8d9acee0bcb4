"""Euclidean projection of the origin onto a convex hull of points.

Five independent formulations compute the same projection: a quadratic
program over the weight simplex, a dual quadratic program over the
nonnegative orthant, a maximin search for the best separating direction,
three linear-complementarity constructions solved by Lemke pivoting, and a
nonnegative-least-squares reduction.  Every answer is certified against the
variational-inequality criterion and the routes are cross-checked against
each other (and, on tiny instances, a brute-force oracle).
"""

from .certify import (
    Certificate,
    ConsensusReport,
    ZeroMembershipVotes,
    check_optimality,
    cross_check,
    detect_zero_membership,
    reference_projection,
)
from .core import (
    DEFAULT_TOLERANCES,
    ConstraintSystem,
    GramMatrix,
    Polyhedron,
    ProjectionResult,
    Route,
    ToleranceConfig,
    constraint_matrix,
    gram_matrix,
    in_D,
    in_omega,
    support_value,
    translate,
    vi_residuals,
)
from .lcp import (
    CanonicalQP,
    LCPInstance,
    LCPOutcome,
    LcpStatus,
    LcpVariant,
    build_lcp,
    canonicalize_primal,
    extract_projection,
    lemke_solve,
)
from .maximin import MaximinSolution, cone_nonempty, projection_from_maximin, solve_maximin
from .nnls import NnlsProblem, ReductionData, construct_b, nnls_solve, project_via_nnls, qp_form
from .simplex_qp import SimplexSolution, optimality_gap, phi, solve_wolfe
from .support_qp import (
    DualOutcome,
    DualStatus,
    dual_gradient,
    dual_objective,
    invert_support_vector,
    recover_primal,
    rho_from_ybar,
    solve_dual,
)

__version__ = "0.1.0"
