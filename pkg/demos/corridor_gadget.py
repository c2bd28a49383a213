"""Corridor tiling to reachability, and why the gadget needs an entry stage.

First the width-3 corridor example: its tiling, the gadget, a plan, and the
tiling read back from the plan.  Then a corridor with no tiling where the
gadget without the entry stage still reaches the target, because one UAV
waits at the base and enters its column a step late.
"""
import argparse

from uavcover.generate import figure3_corridor, make_rng, random_corridor
from uavcover.reductions import ReductionError, corridor_to_reachability, corridor_to_reachability_nc
from uavcover.search import solve_reachability
from uavcover.tiling import CorridorInstance, Tile, solve_corridor_tiling

LATE_ENTRY = CorridorInstance(
    (Tile(0, 0, 0, 1), Tile(1, 1, 1, 0), Tile(0, 1, 0, 0), Tile(0, 0, 0, 1)), 3, (2, 0, 0), (0, 2, 0))


def show(title, inst):
    print(f"== {title}")
    sol = solve_corridor_tiling(inst)
    print("tiling:", None if sol is None else [list(r) for r in sol.rows])
    for name, build, literal in (("literal", corridor_to_reachability, True),
                                 ("entry stage", corridor_to_reachability, False),
                                 ("nc entry stage", corridor_to_reachability_nc, False)):
        red = build(inst, literal=literal)
        out = solve_reachability(red.graph, red.n, red.target)
        line = f"  {name:15s} {red.graph.num_regions:3d} regions: {out.verdict.value}"
        if out.solvable:
            line += f" in {out.plan.length} steps"
            if not literal:
                line += f", rows read back {[list(r) for r in red.certificate.backward(out.plan).rows]}"
        print(line)
        if literal and out.solvable and sol is None:
            for t, frame in enumerate(out.plan):
                print(f"     t={t}: {' '.join(red.graph.labels[r] for r in frame)}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--random", type=int, default=1500, help="random instances to draw for the agreement count")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    show("width-3 example", figure3_corridor())
    show("late entry", LATE_ENTRY)

    rng = make_rng(args.seed)
    tally = {"literal": 0, "entry stage": 0}
    total = 0
    for _ in range(args.random):
        inst = random_corridor(int(rng.integers(2, 4)), int(rng.integers(1, 5)), int(rng.integers(2, 4)), rng=rng)
        try:
            gadgets = {"literal": corridor_to_reachability(inst, literal=True),
                       "entry stage": corridor_to_reachability(inst)}
        except ReductionError:
            continue
        total += 1
        expect = solve_corridor_tiling(inst) is not None
        for name, red in gadgets.items():
            tally[name] += solve_reachability(red.graph, red.n, red.target).solvable == expect
    print(f"\nagreement with the tiling solver on {total} random corridors:",
          ", ".join(f"{k} {v}/{total}" for k, v in tally.items()))


if __name__ == "__main__":
    main()
