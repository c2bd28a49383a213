"""Square tiling to bounded reachability, then on to (bounded) coverage.

Builds the gadget for the 4x4 square example, solves it within k+2 steps,
shows it fails within k+1, and reads the tiling back.  Then wraps a small
square instance in the bounded coverage gadget and a mission-example target in the
unbounded one.
"""
import argparse

from uavcover.generate import figure1_graph, figure2_square, random_square
from uavcover.reductions import (
    breachability_to_bcoverage,
    breachability_to_bcoverage_nc,
    reachability_to_coverage,
    reachability_to_coverage_nc,
    square_to_breachability,
    square_to_breachability_nc,
)
from uavcover.search import solve_bcoverage, solve_breachability, solve_coverage, solve_reachability


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=4)
    args = ap.parse_args()

    inst = figure2_square()
    for build in (square_to_breachability, square_to_breachability_nc):
        red = build(inst)
        out = solve_breachability(red.graph, red.n, red.target, red.bound)
        short = solve_breachability(red.graph, red.n, red.target, red.bound - 1)
        print(f"{build.__name__}: {red.graph.num_regions} regions, {red.n} UAVs,"
              f" bound {red.bound}: {out.verdict.value}; bound {red.bound - 1}: {short.verdict.value}")
        if out.solvable:
            rows = red.certificate.backward(out.plan).rows
            print("  tiling read back (bottom row first):", [list(r) for r in rows])

    small = random_square(1, 2, planted=True, seed=args.seed)
    for sq_build, cov_build in ((square_to_breachability, breachability_to_bcoverage),
                                (square_to_breachability_nc, breachability_to_bcoverage_nc)):
        sq = sq_build(small)
        red = cov_build(sq)
        expect = solve_breachability(sq.graph, sq.n, sq.target, sq.bound)
        out = solve_bcoverage(red.graph, red.n, red.bound)
        print(f"{cov_build.__name__}: {red.graph.num_regions} regions, bound {red.bound}:"
              f" {out.verdict.value} (source {expect.verdict.value})")

    g = figure1_graph()
    for target in ((3, 7, 9), (8, 9, 10)):
        expect = solve_reachability(g, 3, target)
        for build in (reachability_to_coverage, reachability_to_coverage_nc):
            red = build(g, target)
            out = solve_coverage(red.graph, red.n)
            print(f"{build.__name__} target {target}: {red.graph.num_regions} regions,"
                  f" coverage {out.verdict.value} (reachability {expect.verdict.value})")


if __name__ == "__main__":
    main()
