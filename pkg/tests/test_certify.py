import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import (
    LINE_POINTS,
    SEGMENT_THROUGH_ORIGIN,
    SINGLE_POINT,
    TRIANGLE,
    origin_inside_polyhedron,
    random_polyhedron,
    separated_polyhedron,
)
from ppocp.certify import (
    check_optimality,
    cross_check,
    detect_zero_membership,
    reference_projection,
)
from ppocp.core import Polyhedron, Route
from ppocp.errors import OracleScaleExceeded
from ppocp.simplex_qp import solve_wolfe


class TestReferenceProjection:
    def test_single_point(self):
        res = reference_projection(Polyhedron(np.array(SINGLE_POINT)))
        assert_allclose(res.rho, [3.0, 4.0])
        assert res.route is Route.ORACLE

    def test_segment_through_origin(self):
        res = reference_projection(Polyhedron(np.array(SEGMENT_THROUGH_ORIGIN)))
        assert_allclose(res.rho, [0.0, 0.0])
        assert res.origin_inside

    def test_triangle_edge_projection(self):
        res = reference_projection(Polyhedron(np.array(TRIANGLE)))
        assert_allclose(res.rho, [1.0, 1.0], atol=1e-12)

    def test_interior_affine_case(self):
        # Triangle whose affine-hull projection is already feasible.
        P = Polyhedron(np.array([[1.0, 1.0, 1.0], [1.0, -2.0, 1.0], [1.0, 1.0, -2.0]]))
        res = reference_projection(P)
        assert np.all(np.abs(res.rho - [1.0, 0.0, 0.0]) <= 1e-10)

    def test_four_vertices(self):
        P = Polyhedron(np.array([[2.0, 0.0], [0.0, 2.0], [2.0, 2.0], [3.0, 1.0]]))
        res = reference_projection(P)
        assert_allclose(res.rho, [1.0, 1.0], atol=1e-12)

    def test_four_vertices_against_plain_grid(self):
        # Coarse grid scan of the weight simplex as an independent sanity
        # bound on the enumeration result.
        rng = np.random.default_rng(6)
        for _ in range(5):
            z = rng.uniform(-5.0, 5.0, size=(4, 3))
            res = reference_projection(Polyhedron(z))
            ticks = np.linspace(0.0, 1.0, 41)
            a1, a2, a3 = np.meshgrid(ticks, ticks, ticks, indexing="ij")
            pts = np.column_stack([a1.ravel(), a2.ravel(), a3.ravel()])
            pts = pts[pts.sum(axis=1) <= 1.0 + 1e-12]
            weights = np.column_stack([pts, 1.0 - pts.sum(axis=1)])
            grid_best = float(np.min(np.sum((weights @ z) ** 2, axis=1)))
            assert res.distance**2 <= grid_best + 1e-12

    def test_scale_limit(self):
        rng = np.random.default_rng(0)
        with pytest.raises(OracleScaleExceeded):
            reference_projection(Polyhedron(rng.uniform(-1, 1, size=(5, 2))))

    def test_matches_routes_on_small_instances(self):
        for seed in range(30):
            P = random_polyhedron(seed, max_m=4, max_n=5)
            res = reference_projection(P)
            rho_w = solve_wolfe(P).rho
            assert np.linalg.norm(res.rho - rho_w) <= 1e-5

    def test_certificate_always_passes(self):
        for seed in range(20):
            P = random_polyhedron(seed, max_m=4, max_n=4)
            res = reference_projection(P)
            cert = check_optimality(P, res.rho)
            assert cert.passed, [c for c in cert.checks if not c.passed]


class TestCheckOptimality:
    def test_triangle_with_witness(self):
        P = Polyhedron(np.array(TRIANGLE))
        cert = check_optimality(P, np.array([1.0, 1.0]), alpha=np.array([0.5, 0.5, 0.0]))
        assert cert.passed
        assert cert.vi_min == pytest.approx(0.0, abs=1e-14)
        assert not cert.zero_inside

    def test_non_optimal_point_fails(self):
        P = Polyhedron(np.array(TRIANGLE))
        cert = check_optimality(P, np.array([2.0, 2.0]))
        assert not cert.passed
        assert cert.vi_min == pytest.approx(-4.0)

    def test_origin_inside_case(self):
        P = Polyhedron(np.array(SEGMENT_THROUGH_ORIGIN))
        cert = check_optimality(P, np.zeros(2))
        assert cert.passed
        assert cert.zero_inside

    def test_bad_witness_recorded_not_raised(self):
        P = Polyhedron(np.array(TRIANGLE))
        cert = check_optimality(P, np.array([1.0, 1.0]), alpha=np.array([1.0, 0.0, 0.0]))
        names = {c.name: c.passed for c in cert.checks}
        assert not names["hull-witness"]
        assert not cert.passed


class TestDetectZeroMembership:
    def test_segment_votes_inside(self):
        votes = detect_zero_membership(Polyhedron(np.array(SEGMENT_THROUGH_ORIGIN)))
        assert votes.unanimous and votes.inside

    def test_line_points_vote_inside(self):
        votes = detect_zero_membership(Polyhedron(np.array(LINE_POINTS)))
        assert votes.unanimous and votes.inside

    def test_triangle_votes_outside(self):
        votes = detect_zero_membership(Polyhedron(np.array(TRIANGLE)))
        assert votes.unanimous and not votes.inside

    def test_cohorts_vote_correctly(self):
        for seed in range(10):
            assert detect_zero_membership(origin_inside_polyhedron(seed)).inside
            assert not detect_zero_membership(separated_polyhedron(seed)).inside


class TestCrossCheck:
    def test_triangle_report(self):
        report = cross_check(Polyhedron(np.array(TRIANGLE)))
        assert report.verdict == "agree"
        assert report.entries["nnls"].status == "not-applicable"
        assert report.entries["oracle"].status == "ok"
        assert_allclose(report.rho, [1.0, 1.0], atol=1e-8)
        ok = [e for e in report.entries.values() if e.status == "ok"]
        assert len(ok) == 7  # six routes plus the oracle

    def test_axis_pair_includes_nnls(self):
        report = cross_check(Polyhedron(np.array([[2.0, 0.0], [0.0, 2.0]])))
        assert report.verdict == "agree"
        assert report.entries["nnls"].status == "ok"
        assert_allclose(report.entries["nnls"].result.rho, [1.0, 1.0], atol=1e-10)

    def test_single_point(self):
        report = cross_check(Polyhedron(np.array(SINGLE_POINT)))
        assert report.verdict == "agree"
        assert_allclose(report.rho, [3.0, 4.0], atol=1e-9)
        assert report.entries["oracle"].result.distance == pytest.approx(5.0)

    def test_origin_inside_consensus(self):
        report = cross_check(Polyhedron(np.array(SEGMENT_THROUGH_ORIGIN)))
        assert report.verdict == "agree"
        assert all(report.votes.values())

    def test_random_instances_agree(self):
        for seed in range(25):
            report = cross_check(random_polyhedron(seed))
            assert report.verdict == "agree", {
                k: (v.status, v.error) for k, v in report.entries.items()
            }

    def test_duplicate_vertices_are_first_class(self):
        import warnings

        cases = [
            ([[2.0, 0.0], [2.0, 0.0], [0.0, 2.0], [2.0, 2.0], [0.0, 2.0]], [1.0, 1.0]),
            ([[-1.0, 0.0], [1.0, 0.0], [-1.0, 0.0]], [0.0, 0.0]),
            ([[3.0, 4.0], [3.0, 4.0]], [3.0, 4.0]),
        ]
        for vertices, expected in cases:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                P = Polyhedron(np.array(vertices))
            report = cross_check(P)
            assert report.verdict == "agree"
            assert np.allclose(report.rho, expected, atol=1e-8)
