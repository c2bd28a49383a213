import json
import random
from itertools import combinations_with_replacement

import pytest

from oracles import valid
from uavcover.config import Configuration
from uavcover.generate import (
    figure2_square,
    figure3_corridor,
    make_rng,
    random_corridor,
    random_graph,
    random_square,
)
from uavcover.graph import is_neighbor_communicable, parse_graph, validate_graph
from uavcover.reductions import (
    ReductionError,
    bcoverage_bound,
    breachability_to_bcoverage,
    breachability_to_bcoverage_nc,
    corridor_to_reachability,
    corridor_to_reachability_nc,
    reachability_to_coverage,
    reachability_to_coverage_nc,
    square_to_breachability,
    square_to_breachability_nc,
)
from uavcover.search import (
    Verdict,
    solve_bcoverage,
    solve_breachability,
    solve_coverage,
    solve_reachability,
    validate_plan,
)
from uavcover.tiling import (
    CorridorInstance,
    Tile,
    check_corridor_tiling,
    check_square_tiling,
    solve_corridor_tiling,
    solve_square_tiling,
)

CORRIDOR_BUILDERS = [corridor_to_reachability, corridor_to_reachability_nc]

# no corridor tiling exists, but with direct base-to-copy moves the third UAV
# can wait at the base and enter one step late
LATE_ENTRY = CorridorInstance(
    (Tile(0, 0, 0, 1), Tile(1, 1, 1, 0), Tile(0, 1, 0, 0), Tile(0, 0, 0, 1)), 3, (2, 0, 0), (0, 2, 0))


def literal_region_count(inst):
    T = inst.tiles
    white_left = sum(1 for t in T if t.left == 0)
    white_right = sum(1 for t in T if t.right == 0)
    return 1 + white_left + (inst.k - 2) * len(T) + white_right


def test_corridor_region_counts():
    inst = figure3_corridor()
    k = inst.k
    assert corridor_to_reachability(inst, literal=True).graph.num_regions == literal_region_count(inst)
    assert corridor_to_reachability(inst).graph.num_regions == literal_region_count(inst) + k
    assert corridor_to_reachability_nc(inst, literal=True).graph.num_regions == literal_region_count(inst) + k
    assert corridor_to_reachability_nc(inst).graph.num_regions == literal_region_count(inst) + k * (k + 1)


@pytest.mark.parametrize("build", CORRIDOR_BUILDERS)
def test_corridor_structure(build):
    red = build(figure3_corridor())
    assert validate_graph(red.graph) == []
    assert red.n == 3
    assert len(red.node_key) == red.graph.num_regions == len(set(red.node_key))
    assert sorted(red.target.labels(red.graph)) == ["t3@3", "t5@2", "t6@1"]
    assert is_neighbor_communicable(red.graph) == (build is corridor_to_reachability_nc)


def test_corridor_figure3_solvable_with_short_plan():
    inst = figure3_corridor()
    m = solve_corridor_tiling(inst).m
    red = corridor_to_reachability(inst)
    out = solve_reachability(red.graph, red.n, red.target)
    assert out.solvable and out.plan.length == m + 1
    out = solve_reachability(red.graph, red.n, red.target, bound=m)
    assert out.verdict is Verdict.UNSOLVABLE


def test_corridor_untileable():
    # the bottom row passes colour 2 upward and no tile has that colour below
    inst = CorridorInstance((Tile(0, 1, 1, 1), Tile(1, 1, 0, 1), Tile(0, 2, 1, 5), Tile(1, 2, 0, 5)), 2,
                            (2, 3), (0, 1))
    assert solve_corridor_tiling(inst) is None
    for build in CORRIDOR_BUILDERS:
        red = build(inst)
        assert solve_reachability(red.graph, red.n, red.target).verdict is Verdict.UNSOLVABLE


def test_corridor_missing_tile_in_copy():
    inst = CorridorInstance((Tile(1, 0, 0, 0), Tile(0, 0, 1, 0)), 2, (1, 0), (0, 1))
    with pytest.raises(ReductionError, match="copy 1"):
        corridor_to_reachability(inst)


def test_literal_corridor_gadget_admits_late_entry():
    assert solve_corridor_tiling(LATE_ENTRY) is None
    for build in CORRIDOR_BUILDERS:
        literal = build(LATE_ENTRY, literal=True)
        out = solve_reachability(literal.graph, literal.n, literal.target)
        assert out.solvable
        fixed = build(LATE_ENTRY)
        assert solve_reachability(fixed.graph, fixed.n, fixed.target).verdict is Verdict.UNSOLVABLE


def test_corridor_width_one():
    tiles = (Tile(0, 1, 0, 0), Tile(0, 2, 0, 1), Tile(1, 0, 0, 0))
    inst = CorridorInstance(tiles, 1, (1,), (0,))
    for build in CORRIDOR_BUILDERS:
        red = build(inst)
        assert ("tile", 2, 1) not in red.node_key
        assert solve_reachability(red.graph, red.n, red.target).solvable


@pytest.mark.parametrize("build", CORRIDOR_BUILDERS)
def test_corridor_equivalence_and_certificates(build):
    rng = make_rng(31)
    yes = 0
    for _ in range(60):
        k = int(rng.integers(2, 4))
        inst = random_corridor(k, int(rng.integers(2, 5)), int(rng.integers(2, 4)), rng=rng)
        try:
            red = build(inst)
        except ReductionError:
            assert solve_corridor_tiling(inst) is None
            continue
        sol = solve_corridor_tiling(inst)
        out = solve_reachability(red.graph, red.n, red.target)
        assert out.solvable == (sol is not None)
        if sol is not None:
            yes += 1
            plan = red.certificate.forward(sol)
            assert validate_plan(red.graph, plan, goal="reach", target=red.target)
            back = red.certificate.backward(out.plan)
            assert check_corridor_tiling(inst, back) == []
    assert yes >= 10


def test_square_structure():
    inst = figure2_square()
    k, T = inst.k, inst.tiles
    red = square_to_breachability(inst)
    assert red.n == k + 2 and red.bound == k + 2
    assert red.graph.num_regions == 1 + k * len(T) + 4 * (k + 1)
    assert sorted(red.target.labels(red.graph)) == sorted(f"({k + 1},{j})" for j in range(k + 2))
    nc = square_to_breachability_nc(inst)
    assert nc.bound == k + 3 and nc.graph.num_regions == red.graph.num_regions + k + 2
    assert is_neighbor_communicable(nc.graph)


@pytest.mark.parametrize("build", [square_to_breachability, square_to_breachability_nc])
def test_square_figure2(build):
    inst = figure2_square()
    red = build(inst)
    out = solve_breachability(red.graph, red.n, red.target, red.bound)
    assert out.solvable
    assert check_square_tiling(inst, red.certificate.backward(out.plan)) == []
    assert not solve_breachability(red.graph, red.n, red.target, red.bound - 1).solvable
    from uavcover.generate import figure2_tiling
    assert validate_plan(red.graph, red.certificate.forward(figure2_tiling()), goal="reach",
                         target=red.target, bound=red.bound)


@pytest.mark.parametrize("build", [square_to_breachability, square_to_breachability_nc])
def test_square_equivalence(build):
    rng = make_rng(41)
    yes = 0
    for _ in range(40):
        inst = random_square(int(rng.integers(1, 3)), int(rng.integers(1, 5)), int(rng.integers(1, 4)), rng=rng)
        red = build(inst)
        sol = solve_square_tiling(inst)
        out = solve_breachability(red.graph, red.n, red.target, red.bound)
        assert out.solvable == (sol is not None)
        assert not solve_breachability(red.graph, red.n, red.target, red.bound - 1).solvable
        if sol is not None:
            yes += 1
            assert check_square_tiling(inst, red.certificate.backward(out.plan)) == []
    assert yes >= 8


def _reach_instances(count, seed, nc, sizes=(2, 6), ns=(2, 3)):
    rng = random.Random(seed)
    out = []
    i = 0
    while len(out) < count:
        i += 1
        g = random_graph(rng.randint(*sizes), 0.4, 0.5, directed=rng.random() < 0.5, nc=nc, seed=seed * 1000 + i)
        n = rng.choice(ns)
        targets = [c for c in combinations_with_replacement(g.regions, n) if valid(g, c) and set(c) != {0}]
        if targets:
            out.append((g, Configuration(rng.choice(targets))))
    return out


def test_reach_cover_structure():
    g, c = _reach_instances(1, 3, nc=False)[0]
    k = len(c)
    red = reachability_to_coverage(g, c)
    assert red.graph.num_regions == g.num_regions + 2 * k
    assert red.n == k and red.graph.labels[:g.num_regions] == g.labels
    nc = reachability_to_coverage_nc(g, c)
    assert nc.graph.num_regions == g.num_regions + 2 * k * (k + 1) + k + 4 * (k + 1)
    assert is_neighbor_communicable(nc.graph)


@pytest.mark.parametrize("build", [reachability_to_coverage, reachability_to_coverage_nc])
def test_reach_cover_needs_two_uavs(build):
    g = random_graph(3, 0.5, 0.5, seed=1)
    with pytest.raises(ReductionError):
        build(g, Configuration((0,)))


@pytest.mark.parametrize("build, nc", [(reachability_to_coverage, False), (reachability_to_coverage_nc, True)])
def test_reach_cover_equivalence(build, nc):
    yes = 0
    for g, c in _reach_instances(15, 8 + nc, nc):
        expect = solve_reachability(g, len(c), c).solvable
        red = build(g, c)
        out = solve_coverage(red.graph, red.n)
        assert out.solvable == expect
        yes += expect
        if out.plan is not None:
            assert validate_plan(red.graph, out.plan)
    assert 2 <= yes <= 13


def test_bcoverage_bounds():
    assert bcoverage_bound(2, 20) == 47
    assert bcoverage_bound(2, 20, nc=True) == 5 + 8 + 160 + 1
    inst = random_square(2, 3, seed=4)
    sq = square_to_breachability(inst)
    red = breachability_to_bcoverage(sq)
    assert red.bound == 4 + 2 + 2 * sq.graph.num_regions + 1 and red.n == 4
    nc = breachability_to_bcoverage_nc(square_to_breachability_nc(inst))
    assert nc.bound == bcoverage_bound(2, square_to_breachability_nc(inst).graph.num_regions, nc=True)
    with pytest.raises(ReductionError):
        breachability_to_bcoverage(reachability_to_coverage(*_reach_instances(1, 1, False)[0]))


def test_bcoverage_equivalence_small():
    rng = make_rng(5)
    for _ in range(6):
        inst = random_square(1, int(rng.integers(1, 4)), 2, rng=rng)
        expect = solve_square_tiling(inst) is not None
        for sq_build, cov_build in ((square_to_breachability, breachability_to_bcoverage),
                                    (square_to_breachability_nc, breachability_to_bcoverage_nc)):
            red = cov_build(sq_build(inst))
            out = solve_bcoverage(red.graph, red.n, red.bound)
            assert out.solvable == expect
            if out.plan is not None:
                assert validate_plan(red.graph, out.plan, bound=red.bound)


def test_reduced_json_envelope():
    red = corridor_to_reachability(figure3_corridor())
    d = json.loads(red.to_json())
    assert d["problem"] == {"kind": "reachability", "n": 3, "target": red.target.labels(red.graph), "bound": None}
    assert d["node_key"]["B"] == ["base"]
    assert parse_graph(red.to_json()) == red.graph
    assert red.region_of(("tile", 6, 1)) == red.graph.region("t6@1")
