import random
import shutil
import subprocess
from itertools import combinations_with_replacement

import pytest

from oracles import valid
from smv_interp import Model
from uavcover.export import ExportError, InvalidPlan, lint_pddl, lint_smv, parse_sexpr, to_dot, to_pddl, to_smv
from uavcover.generate import figure1_graph, figure1_plan, random_graph
from uavcover.graph import TopologicGraph
from uavcover.search import solve_coverage, solve_reachability


def base_only():
    return TopologicGraph.build(["B"], 0, [], [])


def _problem(text):
    (define,) = parse_sexpr(text)
    return {s[0]: s[1:] for s in define[2:]}


def _init_facts(text, pred):
    return [f for f in _problem(text)[":init"] if f[0] == pred]


def test_pddl_single_region_goal():
    _, prob = to_pddl(base_only(), 1)
    assert _problem(prob)[":goal"] == [["and", ["visited", "r0"], ["at", "u1", "r0"]]]
    assert "; region names: r0=B" in prob


def test_pddl_figure1_counts():
    g = figure1_graph()
    dom, prob = to_pddl(g, 3)
    sec = _problem(prob)
    objects = sec[":objects"]
    regions = objects[objects.index("uav") + 1:objects.index("region") - 1]
    assert regions == [f"r{i}" for i in range(11)]
    moves = _init_facts(prob, "move-adj")
    assert len(moves) == 16 * 2 + 11
    assert len(_init_facts(prob, "comm-adj")) == 23 * 2
    assert lint_pddl(dom, prob) == []
    # the facts give back the graph
    assert {(int(a[1:]), int(b[1:])) for _, a, b in moves} == set(g.moves)


def test_pddl_reach_and_bound():
    g = figure1_graph()
    dom, prob = to_pddl(g, 3, goal="reach", target=(9, 3, 7), bound=4)
    sec = _problem(prob)
    assert sec[":goal"] == [["and", ["at", "u1", "r3"], ["at", "u2", "r7"], ["at", "u3", "r9"]]]
    assert ["bounded"] in sec[":init"] and ["current", "s0"] in sec[":init"]
    assert len(_init_facts(prob, "next-round")) == 4
    assert lint_pddl(dom, prob) == []
    with pytest.raises(ExportError):
        to_pddl(g, 3, goal="reach")
    with pytest.raises(ExportError):
        to_pddl(g, 3, goal="reach", target=(1, 2))


def test_pddl_lint_catches_problems():
    dom, prob = to_pddl(base_only(), 1)
    assert lint_pddl(dom, prob.replace("(is-base r0)", "(is-bass r0)"))
    assert lint_pddl(dom, prob.replace("(at u1 r0)", "(at u1 r9)", 1))
    assert lint_pddl(dom, prob + "(")


def test_exporters_deterministic():
    g = figure1_graph()
    assert to_pddl(g, 3) == to_pddl(figure1_graph(), 3)
    assert to_smv(g, 3) == to_smv(figure1_graph(), 3)
    assert to_dot(g, figure1_plan()) == to_dot(figure1_graph(), figure1_plan())


def test_smv_structure_figure1():
    text = to_smv(figure1_graph(), 3)
    assert lint_smv(text) == []
    m = Model(text)
    assert sorted(n for n in m.vars if n.startswith("u")) == ["u1", "u2", "u3"]
    assert all(len(m.vars[f"u{k}"]) == 11 for k in (1, 2, 3))
    assert text.rstrip().endswith("INVARSPEC !goal")
    # synchronous: one TRANS constrains next() of every UAV
    assert all(f"next(u{k})" in text.split("TRANS")[1] for k in (1, 2, 3))


def test_smv_single_region():
    m = Model(to_smv(base_only(), 1))
    assert m.shortest_violation() == 0


def test_smv_lint_catches_unknown():
    text = to_smv(base_only(), 1).replace("goal := ", "goal := bogus & ")
    assert lint_smv(text) == ["undeclared identifier 'bogus'"]


def test_smv_agrees_with_solver():
    """The counterexample length of the emitted model is the shortest plan length."""
    rng = random.Random(11)
    checked = 0
    for seed in range(40):
        g = random_graph(rng.randint(1, 4), 0.5, 0.5, directed=rng.random() < 0.5, seed=seed)
        n = rng.randint(1, 2)
        out = solve_coverage(g, n)
        assert Model(to_smv(g, n)).shortest_violation() == (out.plan.length if out.solvable else None)
        targets = [c for c in combinations_with_replacement(g.regions, n) if valid(g, c)]
        t = rng.choice(targets)
        out = solve_reachability(g, n, t)
        got = Model(to_smv(g, n, goal="reach", target=t)).shortest_violation()
        assert got == (out.plan.length if out.solvable else None)
        checked += 1
    assert checked == 40


def test_dot_static_and_frames():
    g = figure1_graph()
    static = to_dot(g)
    assert static.count("digraph") == 1 and "✓" not in static
    assert static.count("style=dashed") == 23
    frames = to_dot(g, figure1_plan())
    assert frames.count("digraph") == len(figure1_plan())


def test_dot_visited_marks():
    g = figure1_graph()
    text = to_dot(g, figure1_plan())
    blocks = text.split("digraph ")[1:]
    seen = set()
    for block, frame in zip(blocks, figure1_plan()):
        seen |= set(frame)
        marked = {int(line.split()[0]) for line in block.splitlines() if "✓" in line}
        assert marked == seen


def test_dot_rejects_invalid_plan():
    with pytest.raises(InvalidPlan, match="frame 1"):
        to_dot(figure1_graph(), [(0, 0, 0), (0, 4, 9)])


@pytest.mark.skipif(shutil.which("NuSMV") is None, reason="NuSMV not installed")
def test_nusmv_verdicts(tmp_path):
    for seed in range(10):
        g = random_graph(4, 0.5, 0.5, seed=seed)
        path = tmp_path / f"m{seed}.smv"
        path.write_text(to_smv(g, 2))
        out = subprocess.run(["NuSMV", str(path)], capture_output=True, text=True, timeout=120).stdout
        assert ("is false" in out) == solve_coverage(g, 2).solvable


@pytest.mark.skipif(shutil.which("fast-downward") is None and shutil.which("fast-downward.py") is None,
                    reason="no PDDL planner with derived predicates installed")
def test_planner_verdicts(tmp_path):
    exe = shutil.which("fast-downward") or shutil.which("fast-downward.py")
    for seed in range(5):
        g = random_graph(4, 0.5, 0.5, seed=seed)
        dom, prob = to_pddl(g, 2)
        (tmp_path / "d.pddl").write_text(dom)
        (tmp_path / "p.pddl").write_text(prob)
        res = subprocess.run([exe, "d.pddl", "p.pddl", "--search", "astar(blind())"], cwd=tmp_path,
                             capture_output=True, text=True, timeout=300)
        assert ("Solution found" in res.stdout) == solve_coverage(g, 2).solvable
