#!/usr/bin/env python3
"""Sweep random instances through every route and tabulate agreement.

Example:

    python scripts/consensus_sweep.py --count 50 --max-m 12 --max-n 8 --seed 0

Prints one line per instance (sizes, worst pairwise deviation, votes) and a
summary block; exits nonzero when any instance fails to reach consensus.
"""

import argparse
import sys
import time

import numpy as np

from ppocp.certify import cross_check
from ppocp.core import Polyhedron


def make_instance(seed, max_m, max_n, box):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_n + 1))
    m = int(rng.integers(1, max_m + 1))
    return Polyhedron(rng.uniform(-box, box, size=(m, n)))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=50)
    parser.add_argument("--max-m", type=int, default=12)
    parser.add_argument("--max-n", type=int, default=8)
    parser.add_argument("--box", type=float, default=5.0)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    conflicts = 0
    inside_count = 0
    iteration_totals = {}
    start = time.perf_counter()
    for i in range(args.count):
        P = make_instance(args.seed + i, args.max_m, args.max_n, args.box)
        report = cross_check(P)
        ok = [e for e in report.entries.values() if e.status == "ok"]
        inside = any(report.votes.values())
        inside_count += inside
        for name, entry in report.entries.items():
            if entry.status == "ok":
                iteration_totals.setdefault(name, []).append(entry.result.iterations)
        marker = "" if report.verdict == "agree" else "  <-- CONFLICT"
        if report.verdict != "agree":
            conflicts += 1
        print(
            f"[{i:4d}] m={P.m:2d} n={P.n:2d} routes_ok={len(ok)} "
            f"max_dev={report.pairwise_max_deviation:.2e} "
            f"origin_inside={str(inside):5s}{marker}"
        )
    elapsed = time.perf_counter() - start

    print("-" * 64)
    print(f"instances: {args.count}   conflicts: {conflicts}   "
          f"origin inside: {inside_count}   elapsed: {elapsed:.2f}s")
    print("mean iterations per route:")
    for name in sorted(iteration_totals):
        its = iteration_totals[name]
        print(f"  {name:11s} {np.mean(its):9.1f}  (max {max(its)})")
    return 1 if conflicts else 0


if __name__ == "__main__":
    sys.exit(main())
