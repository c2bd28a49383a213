"""Gadget constructions mapping tiling problems to UAV planning problems.

Every constructor returns a :class:`ReductionOutput`: the topologic graph, the
UAV count, the target configuration and/or step bound, and ``node_key`` giving a
semantic tag for each region.  The tiling gadgets also carry a certificate that
turns a tiling into a plan and a plan back into a tiling.

Tags used in ``node_key``::

    ("base",)                 the base
    ("tile", t, i)            tile type t in copy i (copies numbered from 1)
    ("lane", i, j)            boundary frame cell (row i, column j) of the square gadget
    ("mid", i)                intermediate node on the i-th base exit (neighbour-communicable variants)
    ("entry", i), ("entry", r, i)   entry stage of the corridor gadget
    ("g", label)              region of the embedded reachability graph
    ("s", i), ("v", i)        the s- and v-rows of the coverage gadget
    ("grid", layer, r, i)     lane grids of the neighbour-communicable coverage gadget
    ("path", way, j)          the two long paths between v_1 and the embedded graph
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

from .config import Configuration
from .graph import TopologicGraph, graph_to_dict, neighbor_communicable_closure
from .search import Plan
from .tiling import WHITE, CorridorInstance, SquareInstance, TilingSolution

__all__ = [
    "ReductionError",
    "ReductionOutput",
    "ReductionCertificate",
    "corridor_to_reachability",
    "corridor_to_reachability_nc",
    "reachability_to_coverage",
    "reachability_to_coverage_nc",
    "square_to_breachability",
    "square_to_breachability_nc",
    "breachability_to_bcoverage",
    "breachability_to_bcoverage_nc",
    "bcoverage_bound",
    "tag_label",
]


class ReductionError(ValueError):
    pass


@dataclass(frozen=True)
class ReductionCertificate:
    forward: Callable[[TilingSolution], Plan]
    backward: Callable[[Plan], TilingSolution]


@dataclass(frozen=True)
class ReductionOutput:
    kind: str
    graph: TopologicGraph
    n: int
    target: Configuration | None
    bound: int | None
    node_key: tuple[tuple, ...]
    certificate: ReductionCertificate | None = field(default=None, compare=False, repr=False)
    source_k: int | None = field(default=None, compare=False)

    def region_of(self, tag: tuple) -> int:
        return self._tag_index[tuple(tag)]

    @property
    def _tag_index(self) -> dict:
        idx = self.__dict__.get("_tags")
        if idx is None:
            idx = {t: i for i, t in enumerate(self.node_key)}
            object.__setattr__(self, "_tags", idx)
        return idx

    def problem(self) -> dict:
        g = self.graph
        return {
            "kind": self.kind,
            "n": self.n,
            "target": None if self.target is None else self.target.labels(g),
            "bound": self.bound,
        }

    def to_dict(self) -> dict:
        d = graph_to_dict(self.graph)
        d["node_key"] = {self.graph.labels[i]: list(tag) for i, tag in enumerate(self.node_key)}
        d["problem"] = self.problem()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"


def tag_label(tag: tuple) -> str:
    kind = tag[0]
    if kind == "base":
        return "B"
    if kind == "tile":
        return f"t{tag[1]}@{tag[2]}"
    if kind == "lane":
        return f"({tag[1]},{tag[2]})"
    if kind == "mid":
        return f"m{tag[1]}"
    if kind == "entry":
        return "e" + ",".join(str(x) for x in tag[1:])
    if kind in ("s", "v"):
        return f"{kind}{tag[1]}"
    if kind == "grid":
        return f"grid{tag[1]}[{tag[2]},{tag[3]}]"
    if kind == "path":
        return f"path-{tag[1]}{tag[2]}"
    if kind == "g":
        return str(tag[1])
    raise ValueError(f"unknown tag {tag!r}")


class _Builder:
    def __init__(self):
        self.tags: list[tuple] = []
        self.index: dict[tuple, int] = {}
        self.moves: set[tuple[int, int]] = set()
        self.comms: set[tuple[int, int]] = set()

    def node(self, tag: tuple) -> int:
        tag = tuple(tag)
        if tag not in self.index:
            self.index[tag] = len(self.tags)
            self.tags.append(tag)
        return self.index[tag]

    def __contains__(self, tag) -> bool:
        return tuple(tag) in self.index

    def move(self, a: tuple, b: tuple) -> None:
        self.moves.add((self.index[tuple(a)], self.index[tuple(b)]))

    def comm(self, a: tuple, b: tuple) -> None:
        self.comms.add((self.index[tuple(a)], self.index[tuple(b)]))

    def graph(self, name: str, labels=None) -> TopologicGraph:
        labels = labels or [tag_label(t) for t in self.tags]
        return TopologicGraph.build(labels, self.index[("base",)], self.moves, self.comms, name=name)


def _config(b: _Builder, tags) -> Configuration:
    return Configuration(tuple(sorted(b.index[tuple(t)] for t in tags)))


# -- corridor tiling -> Reachability ----------------------------------------------------


def _corridor_gadget(inst: CorridorInstance, nc: bool, literal: bool) -> ReductionOutput:
    k, T = inst.k, inst.tiles
    b = _Builder()
    B = b.node(("base",))
    for i in range(1, k + 1):
        for t, tile in enumerate(T):
            if i == 1 and tile.left != WHITE:
                continue
            if i == k and tile.right != WHITE:
                continue
            b.node(("tile", t, i))
    for i, t in enumerate(inst.bottom_row, 1):
        if ("tile", t, i) not in b:
            raise ReductionError(f"bottom tile {t} is not available in copy {i}")
    for i, t in enumerate(inst.top_row, 1):
        if ("tile", t, i) not in b:
            raise ReductionError(f"top tile {t} is not available in copy {i}")
    b.moves.add((B, B))
    entry: list[list[tuple]] = []
    if literal and nc:
        entry = [[("mid", i) for i in range(1, k + 1)]]
    elif not literal and not nc:
        entry = [[("entry", i) for i in range(1, k + 1)]]
    elif not literal:
        entry = [[("entry", r, i) for i in range(1, k + 1)] for r in range(1, k + 2)]
    for row in entry:
        for tag in row:
            b.node(tag)
    for i, t in enumerate(inst.bottom_row, 1):
        path = [("base",)] + [row[i - 1] for row in entry] + [("tile", t, i)]
        for x, y in zip(path, path[1:]):
            b.move(x, y)
    if entry and not literal:
        # entry stage: only reachable from the base as a whole row
        for row in entry:
            for x, y in zip(row, row[1:]):
                b.comm(x, y)
            b.comm(row[0], ("base",))
    tiles_in = {i: [tg for tg in b.tags if tg[0] == "tile" and tg[2] == i] for i in range(1, k + 1)}
    for i in range(1, k + 1):
        for x in tiles_in[i]:
            for y in tiles_in[i]:
                if T[x[1]].up == T[y[1]].down:
                    b.move(x, y)
    for x in tiles_in[1]:
        b.comm(("base",), x)
    for i in range(1, k):
        for x in tiles_in[i]:
            for y in tiles_in[i + 1]:
                if T[x[1]].right == T[y[1]].left:
                    b.comm(x, y)
    name = "corridor-reachability" + ("-nc" if nc else "") + ("-literal" if literal else "")
    g = b.graph(name)
    if nc:
        g = neighbor_communicable_closure(g)
    target = _config(b, [("tile", t, i) for i, t in enumerate(inst.top_row, 1)])

    def forward(sol: TilingSolution) -> Plan:
        frames = [(B,) * k]
        for row in entry:
            frames.append(tuple(b.index[tag] for tag in row))
        for row in sol.rows:
            frames.append(tuple(b.index[("tile", t, i)] for i, t in enumerate(row, 1)))
        return Plan(tuple(Configuration(tuple(sorted(f))) for f in frames))

    def backward(plan: Plan) -> TilingSolution:
        rows = []
        for c in plan:
            tags = [b.tags[p] for p in c]
            if all(tg[0] == "tile" for tg in tags):
                rows.append(tuple(tg[1] for tg in sorted(tags, key=lambda tg: tg[2])))
            elif rows:
                raise ReductionError("plan leaves the tile copies after entering them")
        return TilingSolution(tuple(rows))

    return ReductionOutput("reachability", g, k, target, None, tuple(b.tags),
                           ReductionCertificate(forward, backward), source_k=k)


def corridor_to_reachability(inst: CorridorInstance, literal: bool = False) -> ReductionOutput:
    """Corridor tiling instance -> Reachability instance with ``k`` UAVs.

    The UAVs enter the tile copies through entry nodes ``e_1..e_k`` that only
    communicate along the chain ``B ~ e_1 ~ e_2 ~ ... ~ e_k``, so all of them
    must enter on the same step.  ``literal=True`` builds the graph with direct
    ``B -> (bot_i, i)`` moves instead; there a UAV may wait at the base and
    enter late, which admits plans that correspond to no tiling.

    For ``k == 1`` the single copy keeps only tiles white on both sides.
    """
    return _corridor_gadget(inst, nc=False, literal=literal)


def corridor_to_reachability_nc(inst: CorridorInstance, literal: bool = False) -> ReductionOutput:
    """Neighbour-communicable variant.

    Entry goes through a ``(k+1) x k`` grid whose first column communicates with
    the base; the k-th column's top cell is only connected when the whole top
    row is occupied.  ``literal=True`` uses single intermediate nodes
    ``B -> m_i -> (bot_i, i)`` instead.
    """
    return _corridor_gadget(inst, nc=True, literal=literal)


# -- square tiling -> bReachability -----------------------------------------------------


def _square_gadget(inst: SquareInstance, nc: bool) -> ReductionOutput:
    k, T = inst.k, inst.tiles
    b = _Builder()
    B = b.node(("base",))
    for i in range(1, k + 1):
        for t in range(len(T)):
            b.node(("tile", t, i))
    frame = [(i, j) for i in range(k + 2) for j in range(k + 2) if i in (0, k + 1) or j in (0, k + 1)]
    for i, j in frame:
        b.node(("lane", i, j))
    if nc:
        for j in range(k + 2):
            b.node(("mid", j))
    b.moves.add((B, B))
    for j in range(k + 2):
        if nc:
            b.move(("base",), ("mid", j))
            b.move(("mid", j), ("lane", 0, j))
        else:
            b.move(("base",), ("lane", 0, j))
    for i in range(1, k + 1):
        for x, tx in enumerate(T):
            if inst.bottom[i - 1] == tx.down:
                b.move(("lane", 0, i), ("tile", x, i))
            if inst.top[i - 1] == tx.up:
                b.move(("tile", x, i), ("lane", k + 1, i))
            for y, ty in enumerate(T):
                if tx.up == ty.down:
                    b.move(("tile", x, i), ("tile", y, i))
    for i in range(k + 1):
        b.move(("lane", i, 0), ("lane", i + 1, 0))
        b.move(("lane", i, k + 1), ("lane", i + 1, k + 1))
    for i in range(k + 2):
        b.comm(("base",), ("lane", i, 0))
    for i in range(1, k):
        for x, tx in enumerate(T):
            for y, ty in enumerate(T):
                if tx.right == ty.left:
                    b.comm(("tile", x, i), ("tile", y, i + 1))
    for i in (0, k + 1):
        for j in range(k + 1):
            b.comm(("lane", i, j), ("lane", i, j + 1))
    for i in range(1, k + 1):
        for x, tx in enumerate(T):
            if inst.left[i - 1] == tx.left:
                b.comm(("lane", i, 0), ("tile", x, 1))
            if inst.right[i - 1] == tx.right:
                b.comm(("lane", i, k + 1), ("tile", x, k))
    g = b.graph("square-breachability-nc" if nc else "square-breachability")
    if nc:
        g = neighbor_communicable_closure(g)
    target = _config(b, [("lane", k + 1, j) for j in range(k + 2)])
    lead = 1 if nc else 0

    def forward(sol: TilingSolution) -> Plan:
        frames = [(B,) * (k + 2)]
        if nc:
            frames.append(tuple(b.index[("mid", j)] for j in range(k + 2)))
        frames.append(tuple(b.index[("lane", 0, j)] for j in range(k + 2)))
        for r, row in enumerate(sol.rows, 1):
            f = [b.index[("lane", r, 0)], b.index[("lane", r, k + 1)]]
            f += [b.index[("tile", t, i)] for i, t in enumerate(row, 1)]
            frames.append(tuple(f))
        frames.append(tuple(target))
        return Plan(tuple(Configuration(tuple(sorted(f))) for f in frames))

    def backward(plan: Plan) -> TilingSolution:
        frames = list(plan)[2 + lead: 2 + lead + k]
        rows = []
        for c in frames:
            tags = sorted((b.tags[p] for p in c if b.tags[p][0] == "tile"), key=lambda tg: tg[2])
            rows.append(tuple(tg[1] for tg in tags))
        return TilingSolution(tuple(rows))

    bound = k + 3 if nc else k + 2
    return ReductionOutput("breachability", g, k + 2, target, bound, tuple(b.tags),
                           ReductionCertificate(forward, backward), source_k=k)


def square_to_breachability(inst: SquareInstance) -> ReductionOutput:
    """Square tiling instance -> bReachability instance ``(G, c, k + 2)`` with ``k + 2`` UAVs."""
    return _square_gadget(inst, nc=False)


def square_to_breachability_nc(inst: SquareInstance) -> ReductionOutput:
    """Neighbour-communicable variant; the bound becomes ``k + 3``."""
    return _square_gadget(inst, nc=True)


# -- Reachability -> Coverage -------------------------------------------------------------


def _embed(g: TopologicGraph) -> tuple[_Builder, list[str]]:
    b = _Builder()
    for r in g.regions:
        b.node(("base",) if r == g.base else ("g", g.labels[r]))
    b.moves |= set(g.moves)
    b.comms |= set(g.comms)
    return b, list(g.labels)


def _fresh_labels(b: _Builder, labels: list[str]) -> list[str]:
    taken = set(labels)
    out = list(labels)
    for tag in b.tags[len(labels):]:
        lab = tag_label(tag)
        while lab in taken:
            lab = "#" + lab
        taken.add(lab)
        out.append(lab)
    return out


def _check_k(k: int) -> None:
    if k < 2:
        raise ReductionError("the coverage gadget needs a target with at least 2 UAVs")


def _as_cfg(target) -> Configuration:
    return target if isinstance(target, Configuration) else Configuration(tuple(sorted(target)))


def _g_tag(b: _Builder, region: int) -> tuple:
    return b.tags[region]


def reachability_to_coverage(g: TopologicGraph, target: Configuration, kind: str = "coverage") -> ReductionOutput:
    """Embed ``g`` in a graph that can be covered by ``len(target)`` UAVs iff ``target`` is reachable.

    Needs ``k >= 2`` UAVs: with one UAV, ``v_1`` is also the hub ``v_k`` and the
    UAV can fly ``B -> v_1`` without passing through the s-row.
    """
    target = _as_cfg(target)
    k = len(target)
    _check_k(k)
    b, labels = _embed(g)
    gnodes = list(b.tags)
    for i in range(1, k + 1):
        b.node(("s", i))
    for i in range(1, k + 1):
        b.node(("v", i))
    for i, c in enumerate(target.positions, 1):
        b.move(_g_tag(b, c), ("s", i))
        b.move(("s", i), ("v", i))
    for x in gnodes:
        b.move(("v", 1), x)
        b.move(x, ("v", 1))
    for i in range(1, k + 1):
        b.move(("v", i), ("base",))
    b.move(("v", k), ("v", k))
    for i in range(1, k):
        b.comm(("s", i), ("s", i + 1))
    b.comm(("s", 1), ("base",))
    for x in b.tags:
        if x != ("v", k):
            b.comm(("v", k), x)
    name = "reachability-coverage"
    graph = b.graph(name, _fresh_labels(b, labels))
    return ReductionOutput(kind, graph, k, None, None, tuple(b.tags))


def reachability_to_coverage_nc(g: TopologicGraph, target: Configuration, kind: str = "coverage") -> ReductionOutput:
    """Neighbour-communicable coverage gadget with two stacked lane grids of depth ``k + 1``."""
    target = _as_cfg(target)
    k = len(target)
    _check_k(k)
    depth = k + 1
    b, labels = _embed(g)
    gnodes = list(b.tags)
    for layer in (1, 2):
        for r in range(1, depth + 1):
            for i in range(1, k + 1):
                b.node(("grid", layer, r, i))
    for i in range(1, k + 1):
        b.node(("v", i))
    plen = 2 * depth
    for way in ("down", "up"):
        for j in range(1, plen + 1):
            b.node(("path", way, j))
    column = [[("grid", layer, r, i) for layer in (1, 2) for r in range(1, depth + 1)] + [("v", i)]
              for i in range(1, k + 1)]
    for i, c in enumerate(target.positions, 1):
        col = column[i - 1]
        b.move(_g_tag(b, c), col[0])
        for x, y in zip(col, col[1:]):
            b.move(x, y)
    for layer in (1, 2):
        for r in range(1, depth + 1):
            for i in range(1, k):
                b.comm(("grid", layer, r, i), ("grid", layer, r, i + 1))
            anchor = 1 if layer == 1 else k
            b.comm(("grid", layer, r, anchor), ("base",))
    # v_1 -> down path -> any region of g; any region of g -> up path -> v_1
    b.move(("v", 1), ("path", "down", plen))
    for j in range(plen, 1, -1):
        b.move(("path", "down", j), ("path", "down", j - 1))
    for x in gnodes:
        b.move(("path", "down", 1), x)
        b.move(x, ("path", "up", 1))
    for j in range(1, plen):
        b.move(("path", "up", j), ("path", "up", j + 1))
    b.move(("path", "up", plen), ("v", 1))
    for i in range(1, k + 1):
        b.move(("v", i), ("base",))
    b.move(("v", k), ("v", k))
    for x in b.tags:
        if x != ("v", k):
            b.comm(("v", k), x)
    graph = neighbor_communicable_closure(b.graph("reachability-coverage-nc", _fresh_labels(b, labels)))
    return ReductionOutput(kind, graph, k, None, None, tuple(b.tags))


def _from_square(red: ReductionOutput) -> None:
    if red.kind != "breachability" or red.target is None or red.bound is None:
        raise ReductionError("expected the output of square_to_breachability")


def bcoverage_bound(k: int, num_regions: int, nc: bool = False) -> int:
    """Step bound of the bounded coverage instance built from a k x k square gadget with ``num_regions`` regions.

    Plain: (k+2) + 2 + (2|V| + 1).  Neighbour-communicable: (k+3) + 2(k+2) + 2(k+2)|V| + 1.
    """
    K = k + 2
    if nc:
        return (k + 3) + 2 * K + 2 * K * num_regions + 1
    return K + 2 + 2 * num_regions + 1


def breachability_to_bcoverage(red: ReductionOutput) -> ReductionOutput:
    """Bounded coverage instance; bound = (k+2) + 2 + (2 |V(G)| + 1)."""
    _from_square(red)
    out = reachability_to_coverage(red.graph, red.target, kind="bcoverage")
    bound = bcoverage_bound(red.n - 2, red.graph.num_regions)
    return ReductionOutput("bcoverage", out.graph, out.n, None, bound, out.node_key, source_k=red.source_k)


def breachability_to_bcoverage_nc(red: ReductionOutput) -> ReductionOutput:
    """Neighbour-communicable bounded coverage; bound = (k+3) + 2(k+2) + 2(k+2)|V(G)| + 1."""
    _from_square(red)
    out = reachability_to_coverage_nc(red.graph, red.target, kind="bcoverage")
    bound = bcoverage_bound(red.n - 2, red.graph.num_regions, nc=True)
    return ReductionOutput("bcoverage", out.graph, out.n, None, bound, out.node_key, source_k=red.source_k)
