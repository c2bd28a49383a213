import json
import random

import pytest

from oracles import corridor_tileable, square_tileable
from uavcover.generate import (
    figure2_square,
    figure2_tiling,
    figure3_corridor,
    figure3_tiling,
    make_rng,
    random_corridor,
    random_square,
)
from uavcover.tiling import (
    CorridorInstance,
    SquareInstance,
    Tile,
    TilingFormatError,
    TilingSolution,
    check_corridor_tiling,
    check_square_tiling,
    enumerate_rows,
    parse_tiling_instance,
    serialize_tiling_instance,
    solve_corridor_tiling,
    solve_square_tiling,
)

FIG3_ROW_COUNT = 10  # brute force over T^3


def test_square_trivial():
    white = (Tile(0, 0, 0, 0),)
    assert solve_square_tiling(SquareInstance(white, 1, (0,), (0,), (0,), (0,))) is not None
    assert solve_square_tiling(SquareInstance(white, 1, (1,), (0,), (0,), (0,))) is None


def test_square_figure2():
    inst = figure2_square()
    assert check_square_tiling(inst, figure2_tiling()) == []
    sol = solve_square_tiling(inst)
    assert sol is not None and check_square_tiling(inst, sol) == []


def test_corridor_figure3():
    inst = figure3_corridor()
    assert check_corridor_tiling(inst, figure3_tiling()) == []
    assert figure3_tiling().m == 5
    sol = solve_corridor_tiling(inst)
    assert sol is not None and check_corridor_tiling(inst, sol) == []
    assert sol.m <= 5


def test_corridor_top_equals_bottom():
    t = (Tile(0, 1, 0, 2),)
    inst = CorridorInstance(t, 1, (0,), (0,))
    sol = solve_corridor_tiling(inst)
    assert sol is not None and sol.m == 1
    two = (Tile(0, 1, 0, 2), Tile(0, 3, 0, 3))
    assert solve_corridor_tiling(CorridorInstance(two, 1, (1,), (0,))) is None


def test_corridor_non_admissible_row():
    t = (Tile(1, 0, 0, 0), Tile(0, 0, 0, 0))
    assert solve_corridor_tiling(CorridorInstance(t, 1, (0,), (1,))) is None


def test_enumerate_rows():
    a, b = Tile(0, 0, 1, 0), Tile(1, 0, 0, 0)
    probe = CorridorInstance((a, b), 2, (0, 1), (0, 1))
    assert enumerate_rows(probe) == [(0, 1)]
    one = CorridorInstance((Tile(0, 0, 0, 0), Tile(1, 0, 0, 0), Tile(0, 2, 0, 1)), 1, (0,), (0,))
    assert enumerate_rows(one) == [(0,), (2,)]
    assert len(enumerate_rows(figure3_corridor())) == FIG3_ROW_COUNT


def test_checkers_report():
    inst = figure3_corridor()
    bad = TilingSolution(((7, 2, 4), (6, 5, 3), (6, 5, 3)))
    assert any("(v)" in x for x in check_corridor_tiling(inst, bad))
    sq = figure2_square()
    rows = [list(r) for r in figure2_tiling().rows]
    rows[0][0] = 7
    assert check_square_tiling(sq, TilingSolution(tuple(map(tuple, rows))))


def test_corridor_agrees_with_naive_backtracking():
    """Instances whose BFS answer needs at most 4 rows must match the naive search."""
    rng = make_rng(99)
    compared = 0
    for _ in range(300):
        k = int(rng.integers(1, 4))
        inst = random_corridor(k, int(rng.integers(1, 5)), int(rng.integers(1, 4)), rng=rng)
        sol = solve_corridor_tiling(inst)
        naive = corridor_tileable(inst, 4)
        if sol is not None:
            assert check_corridor_tiling(inst, sol) == []
            if sol.m <= 4:
                assert naive
                compared += 1
            continue
        assert not naive
        compared += 1
    assert compared >= 250


def test_square_agrees_with_enumeration():
    rng = make_rng(7)
    yes = 0
    for _ in range(150):
        k = int(rng.integers(1, 3))
        inst = random_square(k, int(rng.integers(1, 4)), int(rng.integers(1, 4)), rng=rng)
        sol = solve_square_tiling(inst)
        assert (sol is not None) == square_tileable(inst)
        if sol is not None:
            yes += 1
            assert check_square_tiling(inst, sol) == []
    assert 20 <= yes <= 140


def test_serialization_round_trip():
    for inst in (figure2_square(), figure3_corridor()):
        assert parse_tiling_instance(serialize_tiling_instance(inst)) == inst


@pytest.mark.parametrize("doc, msg", [
    ({"kind": "corridor", "tiles": [[0, 0, 0, 0]], "k": 1, "top_row": [0]}, "missing required key 'bottom_row'"),
    ({"kind": "square", "tiles": [], "k": 1, "top": [0], "bottom": [0], "left": [0], "right": [0], "x": 1},
     "unknown field 'x'"),
    ({"kind": "corridor", "tiles": [[0, 0, 0, 0]], "k": 1, "top_row": [3], "bottom_row": [0]}, "unknown tile"),
    ({"kind": "hexagon", "tiles": [], "k": 1}, "unknown tiling kind"),
])
def test_parse_errors(doc, msg):
    with pytest.raises(TilingFormatError, match=msg):
        parse_tiling_instance(json.dumps(doc))
