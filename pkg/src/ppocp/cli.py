"""Command-line front end: load an instance, run routes, emit certificates.

Input instances are JSON documents ``{"vertices": [[...], ...]}`` with one
row per vertex; all rows share a length and every number is a finite IEEE
double in decimal text.  Results are printed to stdout as JSON (default) or
text, with floats rendered at 17 significant digits so output is byte
stable for a fixed input and flag set.

Exit codes: 0 success (including a mathematically inapplicable nnls route),
2 invalid input or usage, 3 solver non-convergence, 4 any cross-route or
internal consistency conflict.

A ``gen`` subcommand emits random test instances; the environment variable
``PPOCP_SEED`` fixes its seed (default 0).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .certify import check_optimality, cross_check
from .core import (
    Polyhedron,
    Route,
    ToleranceConfig,
    projection_result,
    translate,
)
from .errors import (
    ConflictingCharacterizations,
    InconsistentOutcome,
    InternalInconsistency,
    MaxIterExceeded,
    PivotLimitExceeded,
    PpocpError,
    ZeroVector,
)
from .lcp import LcpVariant, build_lcp, extract_projection, lemke_solve
from .maximin import solve_maximin
from .nnls import project_via_nnls
from .simplex_qp import solve_wolfe
from .support_qp import DualStatus, solve_dual

METHODS = (
    "wolfe",
    "dual",
    "maximin",
    "lcp-primal",
    "lcp-wolfe",
    "lcp-dual",
    "nnls",
    "all",
)

_ROUTE_ORDER = (
    "wolfe",
    "dual",
    "maximin",
    "lcp-primal",
    "lcp-wolfe",
    "lcp-dual",
    "nnls",
    "oracle",
)


@dataclass(frozen=True)
class RunConfig:
    """Parsed invocation: what to load, which route, how to report."""

    input: str
    method: str
    tolerances: ToleranceConfig
    point: np.ndarray | None
    output: str
    verbose: bool


def _json_text(obj) -> str:
    """Serialize with floats at 17 significant digits and fixed field order."""
    if isinstance(obj, dict):
        inner = ", ".join(f"{json.dumps(str(k))}: {_json_text(v)}" for k, v in obj.items())
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json_text(v) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g")
    return json.dumps(obj)


def _reject_constant(name):
    raise ValueError(f"non-finite number {name!r} in instance file")


def _load_instance(path: str) -> Polyhedron:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh, parse_constant=_reject_constant)
    if not isinstance(doc, dict) or "vertices" not in doc:
        raise ValueError('instance file must be an object with a "vertices" key')
    rows = doc["vertices"]
    if not isinstance(rows, list) or not rows:
        raise ValueError("vertices must be a nonempty list of rows")
    lengths = set()
    for row in rows:
        if not isinstance(row, list) or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in row
        ):
            raise ValueError("every vertex must be a list of numbers")
        lengths.add(len(row))
    if len(lengths) != 1 or lengths == {0}:
        raise ValueError("all vertex rows must share the same positive length")
    return Polyhedron(np.array(rows, dtype=float))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="project",
        description="Project the origin (or --point) onto the convex hull of "
        "the given vertices.",
    )
    parser.add_argument("--input", required=True, help="instance JSON file")
    parser.add_argument("--method", default="all", choices=METHODS)
    parser.add_argument("--tol", type=float, help="optimality residual bound")
    parser.add_argument("--feas-tol", type=float, help="constraint violation bound")
    parser.add_argument("--zero-tol", type=float, help="origin-membership threshold")
    parser.add_argument("--max-iter", type=int, help="iteration budget")
    parser.add_argument(
        "--point",
        type=float,
        nargs="+",
        metavar="X",
        help="project this point instead of the origin",
    )
    parser.add_argument("--output", default="json", choices=("json", "text"))
    parser.add_argument("--verbose", action="store_true")
    return parser


def _build_gen_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="project gen", description="Generate a random test instance."
    )
    parser.add_argument("--m", type=int, required=True, help="vertex count")
    parser.add_argument("--n", type=int, required=True, help="ambient dimension")
    parser.add_argument("--box", type=float, default=5.0, help="coordinate half-width")
    return parser


def _config_from(ns) -> ToleranceConfig:
    defaults = ToleranceConfig()
    return ToleranceConfig(
        feas_tol=ns.feas_tol if ns.feas_tol is not None else defaults.feas_tol,
        opt_tol=ns.tol if ns.tol is not None else defaults.opt_tol,
        zero_tol=ns.zero_tol if ns.zero_tol is not None else defaults.zero_tol,
        max_iter=ns.max_iter if ns.max_iter is not None else defaults.max_iter,
        unbounded_cap=defaults.unbounded_cap,
    )


def _certificate_payload(cert) -> dict:
    payload = {
        "passed": cert.passed,
        "vi_min": cert.vi_min,
        "zero_inside": cert.zero_inside,
        "checks": [
            {"name": c.name, "passed": c.passed, "residual": c.residual}
            for c in cert.checks
        ],
        "alpha_witness": None
        if cert.alpha_witness is None
        else list(cert.alpha_witness),
    }
    return payload


def _report_payload(report) -> dict:
    routes = {}
    for name in _ROUTE_ORDER:
        if name not in report.entries:
            continue
        entry = report.entries[name]
        if entry.status == "ok":
            r = entry.result
            routes[name] = {
                "status": "ok",
                "rho": list(r.rho),
                "distance": r.distance,
                "iterations": r.iterations,
                "vi_min": r.vi_min,
                "origin_inside": r.origin_inside,
            }
        elif entry.status == "not-applicable":
            routes[name] = {"status": "not-applicable"}
        else:
            routes[name] = {"status": "error", "error": entry.error}
    return {
        "verdict": report.verdict,
        "pairwise_max_deviation": report.pairwise_max_deviation,
        "votes": {k: v for k, v in sorted(report.votes.items())},
        "routes": routes,
    }


def _run_single(method: str, P: Polyhedron, cfg: ToleranceConfig, verbose: bool):
    """Run one route; returns (result, alpha_witness) or None if inapplicable."""
    if method == "wolfe":
        sol = solve_wolfe(P, cfg)
        result = projection_result(
            P, sol.rho, Route.WOLFE, sol.iterations, cfg, origin_inside=sol.origin_inside
        )
        return result, sol.alpha
    if method == "dual":
        out = solve_dual(P, cfg)
        if out.status is DualStatus.UNBOUNDED_BELOW:
            result = projection_result(
                P, np.zeros(P.n), Route.DUAL, out.iterations, cfg, origin_inside=True
            )
        else:
            result = projection_result(
                P, out.rho, Route.DUAL, out.iterations, cfg, origin_inside=False
            )
        return result, None
    if method == "maximin":
        sol = solve_maximin(P, cfg)
        result = projection_result(
            P, sol.rho, Route.MAXIMIN, sol.iterations, cfg, origin_inside=sol.origin_inside
        )
        return result, None
    if method.startswith("lcp-"):
        variant = {
            "lcp-primal": LcpVariant.PRIMAL_SPLIT,
            "lcp-wolfe": LcpVariant.WOLFE_KKT,
            "lcp-dual": LcpVariant.DUAL_ORTHANT,
        }[method]
        instance = build_lcp(P, variant)
        outcome = lemke_solve(instance, cfg, verbose=verbose)
        return extract_projection(P, instance, outcome, cfg), None
    if method == "nnls":
        result = project_via_nnls(P, cfg)
        if result is None:
            return None
        return result, None
    raise ValueError(f"unknown method {method!r}")


def _result_payload(result, certificate, shift, report=None) -> dict:
    rho = np.asarray(result.rho)
    if shift is not None:
        rho = rho + shift
    payload = {
        "rho": list(rho),
        "distance": result.distance,
        "route": result.route.value if report is None else "consensus",
        "origin_inside": result.origin_inside,
        "certificate": _certificate_payload(certificate),
    }
    if report is not None:
        payload["report"] = _report_payload(report)
    return payload


def _render_text(payload, out):
    def emit(key, value):
        if isinstance(value, dict):
            for k, v in value.items():
                emit(f"{key}.{k}" if key else str(k), v)
        elif isinstance(value, (list, tuple)) and value and isinstance(value[0], dict):
            for i, v in enumerate(value):
                emit(f"{key}[{i}]", v)
        else:
            print(f"{key} = {_json_text(value)}", file=out)

    emit("", payload)


def _emit(payload, fmt: str, out=None):
    out = out if out is not None else sys.stdout
    if fmt == "json":
        print(_json_text(payload), file=out)
    else:
        _render_text(payload, out)


def _run_gen(argv) -> int:
    parser = _build_gen_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as ex:
        return int(ex.code or 0)
    if ns.m < 1 or ns.n < 1 or ns.box <= 0:
        print("error: need m >= 1, n >= 1, box > 0", file=sys.stderr)
        return 2
    seed = int(os.environ.get("PPOCP_SEED", "0"))
    rng = np.random.default_rng(seed)
    vertices = rng.uniform(-ns.box, ns.box, size=(ns.m, ns.n))
    _emit({"vertices": [list(row) for row in vertices]}, "json")
    return 0


def run(argv=None) -> int:
    """Entry point; returns the process exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "gen":
        return _run_gen(argv[1:])
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as ex:
        return int(ex.code or 0)

    try:
        P = _load_instance(ns.input)
        run_cfg = RunConfig(
            input=ns.input,
            method=ns.method,
            tolerances=_config_from(ns),
            point=None if ns.point is None else np.asarray(ns.point, dtype=float),
            output=ns.output,
            verbose=ns.verbose,
        )
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    cfg = run_cfg.tolerances

    shift = None
    work = P
    if run_cfg.point is not None:
        shift = run_cfg.point
        if len(shift) != P.n:
            print(
                f"error: --point needs {P.n} coordinates, got {len(shift)}",
                file=sys.stderr,
            )
            return 2
        if not np.all(np.isfinite(shift)):
            print("error: --point must be finite", file=sys.stderr)
            return 2
        work = translate(P, shift)

    try:
        if run_cfg.method == "all":
            report = cross_check(work, cfg)
            headline = None
            for name in _ROUTE_ORDER:
                entry = report.entries.get(name)
                if entry is not None and entry.status == "ok":
                    headline = entry.result
                    break
            if headline is None:
                print("error: every route failed", file=sys.stderr)
                return 4
            certificate = check_optimality(work, headline.rho, cfg=cfg)
            payload = _result_payload(headline, certificate, shift, report=report)
            _emit(payload, run_cfg.output)
            if report.verdict != "agree":
                print("error: cross-route consensus conflict", file=sys.stderr)
                return 4
            return 0

        outcome = _run_single(run_cfg.method, work, cfg, run_cfg.verbose)
        if outcome is None:
            _emit({"status": "not-applicable"}, run_cfg.output)
            return 0
        result, witness = outcome
        certificate = check_optimality(work, result.rho, alpha=witness, cfg=cfg)
        _emit(_result_payload(result, certificate, shift), run_cfg.output)
        return 0
    except (MaxIterExceeded, PivotLimitExceeded) as err:
        print(f"error: solver did not converge: {err}", file=sys.stderr)
        return 3
    except (
        ConflictingCharacterizations,
        InternalInconsistency,
        InconsistentOutcome,
        ZeroVector,
    ) as err:
        print(f"error: consistency conflict: {err}", file=sys.stderr)
        return 4
    except PpocpError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
