"""Random instance generation, experiment suites and the worked-example fixtures."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import Configuration
from .graph import TopologicGraph, graph_to_dict, neighbor_communicable_closure, parse_graph
from .tiling import CorridorInstance, SquareInstance, Tile, TilingSolution, enumerate_rows

__all__ = [
    "FAMILIES",
    "SuiteItem",
    "make_rng",
    "random_graph",
    "figure1_graph",
    "figure1_plan",
    "figure2_square",
    "figure2_tiling",
    "figure3_corridor",
    "figure3_tiling",
    "random_corridor",
    "random_square",
    "experiment_suite",
    "write_suite",
    "load_suite",
]

RNG_NAME = "numpy.PCG64/SeedSequence v1"

# family name -> (directed, neighbor-communicable, uav rule)
FAMILIES = {
    "nc-undirected-full": (False, True, "full"),
    "nc-undirected-half": (False, True, "half"),
    "arbitrary-full": (True, False, "full"),
    "arbitrary-half": (True, False, "half"),
}
DEFAULT_SIZES = (5, 10, 15, 20)


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """PCG64 stream for ``seed``, split deterministically by the integer ``key``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(key))))


def random_graph(
    num_regions: int,
    edge_prob_move: float = 0.3,
    edge_prob_comm: float = 0.3,
    directed: bool = False,
    nc: bool = False,
    seed: int = 0,
    rng: np.random.Generator | None = None,
) -> TopologicGraph:
    """Random topologic graph with base ``0``.

    Every candidate move pair (self-loops on non-base regions included) and every
    unordered communication pair is kept independently with the given
    probability.  Undirected graphs draw one coin per unordered move pair.
    """
    if num_regions < 1:
        raise ValueError("num_regions must be >= 1")
    for p in (edge_prob_move, edge_prob_comm):
        if not 0.0 <= p <= 1.0:
            raise ValueError("probabilities must lie in [0, 1]")
    if rng is None:
        rng = make_rng(seed)
    n = num_regions
    moves = {(0, 0)}
    for a in range(1, n):
        if rng.random() < edge_prob_move:
            moves.add((a, a))
    for a in range(n):
        for b in range(n):
            if a == b or (not directed and b < a):
                continue
            if rng.random() < edge_prob_move:
                moves.add((a, b))
                if not directed:
                    moves.add((b, a))
    comms = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < edge_prob_comm:
                comms.append((a, b))
    g = TopologicGraph.build([str(i) for i in range(n)], 0, moves, comms)
    return neighbor_communicable_closure(g) if nc else g


def _random_tiles(rng: np.random.Generator, num_tiles: int, num_colours: int) -> tuple[Tile, ...]:
    return tuple(Tile(*(int(x) for x in rng.integers(0, num_colours, 4))) for _ in range(num_tiles))


def random_corridor(
    k: int,
    num_tiles: int,
    num_colours: int = 2,
    seed: int = 0,
    rng: np.random.Generator | None = None,
) -> CorridorInstance:
    """Random corridor instance; boundary rows are drawn from the admissible rows when there are any."""
    if k < 1 or num_tiles < 1 or num_colours < 1:
        raise ValueError("k, num_tiles and num_colours must be positive")
    if rng is None:
        rng = make_rng(seed)
    tiles = _random_tiles(rng, num_tiles, num_colours)
    rows = enumerate_rows(CorridorInstance(tiles, k, (0,) * k, (0,) * k))
    if rows:
        bottom, top = (rows[int(i)] for i in rng.integers(0, len(rows), 2))
    else:
        bottom, top = (tuple(int(x) for x in rng.integers(0, num_tiles, k)) for _ in range(2))
    return CorridorInstance(tiles, k, top, bottom)


def random_square(
    k: int,
    num_tiles: int,
    num_colours: int = 2,
    planted: bool | None = None,
    seed: int = 0,
    rng: np.random.Generator | None = None,
) -> SquareInstance:
    """Random square instance.

    With ``planted`` a random k x k grid of tile indices is fixed first and the
    tile colours are drawn so that this grid is a valid tiling; the boundary is
    read off it.  Otherwise tiles and boundary are independent.  ``None`` flips
    a coin.
    """
    if k < 1 or num_tiles < 1 or num_colours < 1:
        raise ValueError("k, num_tiles and num_colours must be positive")
    if rng is None:
        rng = make_rng(seed)
    if planted is None:
        planted = bool(rng.integers(0, 2))
    if not planted:
        tiles = _random_tiles(rng, num_tiles, num_colours)
        top, bottom, left, right = (tuple(int(x) for x in rng.integers(0, num_colours, k)) for _ in range(4))
        return SquareInstance(tiles, k, top, bottom, left, right)
    grid = rng.integers(0, num_tiles, (k, k))
    # colour variable 4*t + side, sides ordered (left, up, right, down); row 0 is the bottom
    parent = list(range(4 * num_tiles))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(k):
        for j in range(k):
            t = int(grid[i, j])
            if j + 1 < k:
                parent[find(4 * t + 2)] = find(4 * int(grid[i, j + 1]))
            if i + 1 < k:
                parent[find(4 * t + 1)] = find(4 * int(grid[i + 1, j]) + 3)
    palette = rng.integers(0, num_colours, 4 * num_tiles)
    colour = [int(palette[find(x)]) for x in range(4 * num_tiles)]
    tiles = tuple(Tile(*colour[4 * t:4 * t + 4]) for t in range(num_tiles))
    top = tuple(tiles[int(grid[k - 1, j])].up for j in range(k))
    bottom = tuple(tiles[int(grid[0, j])].down for j in range(k))
    left = tuple(tiles[int(grid[i, 0])].left for i in range(k))
    right = tuple(tiles[int(grid[i, k - 1])].right for i in range(k))
    return SquareInstance(tiles, k, top, bottom, left, right)


# -- worked examples ---------------------------------------------------------

_FIG1_MOVES = [(0, 1), (0, 3), (0, 4), (1, 2), (1, 4), (2, 4), (3, 4), (4, 5), (5, 6),
               (6, 7), (6, 8), (6, 9), (6, 10), (7, 10), (8, 9), (9, 10)]
_FIG1_COMMS = [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 4), (2, 8), (3, 4),
               (3, 7), (4, 5), (4, 6), (5, 6), (6, 7), (6, 8), (6, 9), (6, 10), (7, 9), (7, 10),
               (8, 9), (8, 10), (9, 10)]
# positions of the three UAVs in each panel of the mission example
_FIG1_FRAMES = [(0, 0, 0), (0, 0, 4), (0, 4, 5), (4, 5, 6), (4, 6, 10), (3, 7, 9),
                (4, 6, 8), (4, 5, 6), (2, 4, 5), (1, 3, 4), (0, 0, 0)]


def figure1_graph() -> TopologicGraph:
    """The 11-region mission example: symmetric moves with self-loops everywhere."""
    moves = {(a, a) for a in range(11)}
    for a, b in _FIG1_MOVES:
        moves.add((a, b))
        moves.add((b, a))
    return TopologicGraph.build([str(i) for i in range(11)], 0, moves, _FIG1_COMMS, name="figure1")


def figure1_plan() -> list[Configuration]:
    return [Configuration(f) for f in _FIG1_FRAMES]


# tile colours: 0 white, 1 red, 2 yellow, 3 green; tiles are (left, up, right, down)
_FIG2_TILES = [(1, 1, 1, 1), (1, 1, 2, 1), (1, 1, 1, 2), (3, 1, 2, 1),
               (1, 1, 1, 3), (1, 3, 3, 1), (2, 2, 1, 1), (2, 1, 1, 1)]
_FIG2_ROWS = [[0, 2, 0, 4], [7, 0, 0, 1], [0, 0, 0, 0], [3, 6, 0, 5]]
_FIG3_TILES = [(1, 1, 1, 1), (1, 1, 0, 1), (1, 1, 1, 2), (3, 1, 0, 1),
               (1, 1, 0, 3), (1, 3, 3, 1), (0, 2, 1, 1), (0, 1, 1, 1)]
_FIG3_ROWS = [[7, 2, 4], [7, 0, 1], [7, 0, 1], [7, 0, 1], [6, 5, 3]]


def figure2_square() -> SquareInstance:
    """4x4 square example; every boundary reads red, yellow, red, green."""
    side = (1, 2, 1, 3)
    return SquareInstance(tuple(Tile(*t) for t in _FIG2_TILES), 4, side, side, side, side)


def figure2_tiling() -> TilingSolution:
    return TilingSolution(tuple(tuple(r) for r in _FIG2_ROWS))


def figure3_corridor() -> CorridorInstance:
    """Width-3 corridor example: bottom red/yellow/green, top yellow/green/red."""
    return CorridorInstance(tuple(Tile(*t) for t in _FIG3_TILES), 3, tuple(_FIG3_ROWS[-1]), tuple(_FIG3_ROWS[0]))


def figure3_tiling() -> TilingSolution:
    return TilingSolution(tuple(tuple(r) for r in _FIG3_ROWS))


# -- experiment suites -------------------------------------------------------


@dataclass(frozen=True)
class SuiteItem:
    family: str
    size: int
    index: int
    n: int
    graph: TopologicGraph

    @property
    def name(self) -> str:
        return f"{self.family}-v{self.size}-{self.index:03d}"


def uav_count(family: str, size: int) -> int:
    rule = FAMILIES[family][2]
    return size if rule == "full" else math.ceil(size / 2)


def experiment_suite(
    family: str,
    sizes=DEFAULT_SIZES,
    count: int = 100,
    seed: int = 0,
    edge_prob_move: float = 0.3,
    edge_prob_comm: float = 0.3,
) -> list[SuiteItem]:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {sorted(FAMILIES)}")
    directed, nc, _ = FAMILIES[family]
    fam_idx = sorted(FAMILIES).index(family)
    items = []
    for size in sizes:
        if size < 1:
            raise ValueError("sizes must be positive")
        for i in range(count):
            rng = make_rng(seed, fam_idx, size, i)
            g = random_graph(size, edge_prob_move, edge_prob_comm, directed=directed, nc=nc, rng=rng)
            g = TopologicGraph(g.labels, g.base, g.moves, g.comms, f"{family}-v{size}-{i:03d}")
            items.append(SuiteItem(family, size, i, uav_count(family, size), g))
    return items


def write_suite(directory: str | Path, items: list[SuiteItem], params: dict) -> Path:
    """Write one JSON file per instance plus ``manifest.json`` (order = manifest order)."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    entries = []
    for it in items:
        fname = it.name + ".json"
        body = graph_to_dict(it.graph)
        body["problem"] = {"kind": "coverage", "n": it.n, "target": None, "bound": None}
        (d / fname).write_text(json.dumps(body, indent=1) + "\n")
        entries.append({"file": fname, "family": it.family, "size": it.size, "index": it.index, "n": it.n})
    manifest = {"rng": RNG_NAME, "params": params, "instances": entries}
    path = d / "manifest.json"
    path.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    return path


def load_suite(directory: str | Path) -> tuple[dict, list[SuiteItem]]:
    d = Path(directory)
    manifest = json.loads((d / "manifest.json").read_text())
    items = []
    for e in manifest["instances"]:
        g = parse_graph((d / e["file"]).read_text())
        items.append(SuiteItem(e["family"], e["size"], e["index"], e["n"], g))
    return manifest, items
