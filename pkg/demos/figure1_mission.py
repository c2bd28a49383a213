"""Walk through the 11-region mission example.

Solves coverage with 1, 2 and 3 UAVs, prints the shortest 3-UAV plan frame by
frame, checks the hand-transcribed plan, and optionally writes DOT frames.
"""
import argparse
from pathlib import Path

from uavcover.export import to_dot
from uavcover.generate import figure1_graph, figure1_plan
from uavcover.search import min_uavs_for_coverage, solve_coverage, validate_plan


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dot", help="write one DOT graph per plan frame to this file")
    args = ap.parse_args()

    g = figure1_graph()
    print(f"{g.num_regions} regions, {len(g.comm_pairs())} communication pairs")
    for n in (1, 2, 3):
        out = solve_coverage(g, n)
        print(f"n={n}: {out.verdict.value}, {out.stats.expanded} states expanded")
    print("fewest UAVs that can cover the map:", min_uavs_for_coverage(g, 4))

    plan = solve_coverage(g, 3).plan
    print(f"\nshortest plan, {plan.length} steps:")
    seen = set()
    for t, frame in enumerate(plan):
        seen |= set(frame)
        where = " ".join(g.labels[r] for r in frame)
        print(f"  t={t:2d}  UAVs at {where:10s} visited {len(seen)}/{g.num_regions}")

    res = validate_plan(g, figure1_plan())
    print(f"\ntranscribed plan from the figure: {'valid' if res else res.reason},"
          f" {len(figure1_plan()) - 1} steps")

    if args.dot:
        Path(args.dot).write_text(to_dot(g, plan))
        print(f"wrote {plan.length + 1} frames to {args.dot}")


if __name__ == "__main__":
    main()
