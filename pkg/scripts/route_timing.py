#!/usr/bin/env python3
"""Time each route over a grid of instance sizes.

Example:

    python scripts/route_timing.py --sizes 4x2 8x4 12x8 --repeats 20
"""

import argparse
import sys
import time

import numpy as np

from ppocp.core import Polyhedron
from ppocp.lcp import LcpVariant, build_lcp, extract_projection, lemke_solve
from ppocp.maximin import solve_maximin
from ppocp.nnls import project_via_nnls
from ppocp.simplex_qp import solve_wolfe
from ppocp.support_qp import solve_dual

ROUTES = {
    "wolfe": lambda P: solve_wolfe(P),
    "dual": lambda P: solve_dual(P),
    "maximin": lambda P: solve_maximin(P),
    "lcp-primal": lambda P: _lcp(P, LcpVariant.PRIMAL_SPLIT),
    "lcp-wolfe": lambda P: _lcp(P, LcpVariant.WOLFE_KKT),
    "lcp-dual": lambda P: _lcp(P, LcpVariant.DUAL_ORTHANT),
    "nnls": lambda P: project_via_nnls(P),
}


def _lcp(P, variant):
    instance = build_lcp(P, variant)
    outcome = lemke_solve(instance)
    return extract_projection(P, instance, outcome)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", nargs="+", default=["4x2", "8x4", "12x8"],
                        metavar="MxN")
    parser.add_argument("--repeats", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    header = f"{'size':>7s} " + " ".join(f"{name:>11s}" for name in ROUTES)
    print(header)
    for size in args.sizes:
        m, n = (int(x) for x in size.lower().split("x"))
        rng = np.random.default_rng(args.seed)
        instances = [
            Polyhedron(rng.uniform(-5.0, 5.0, size=(m, n)))
            for _ in range(args.repeats)
        ]
        cells = []
        for name, runner in ROUTES.items():
            start = time.perf_counter()
            for P in instances:
                runner(P)
            per_call = (time.perf_counter() - start) / args.repeats
            cells.append(f"{per_call * 1e3:9.2f}ms")
        print(f"{size:>7s} " + " ".join(f"{c:>11s}" for c in cells))
    return 0


if __name__ == "__main__":
    sys.exit(main())
