"""Topologic graphs: regions, a base, a move relation and a communication relation.

Regions are densely indexed ``0..|V|-1`` and carry unique string labels.  The
move relation is a set of ordered pairs; the communication relation is stored
symmetric (both orientations present) and never relates a region to itself.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

__all__ = [
    "GraphFormatError",
    "TopologicGraph",
    "validate_graph",
    "is_neighbor_communicable",
    "neighbor_communicable_closure",
    "parse_graph",
    "serialize_graph",
    "graph_to_dict",
    "graph_from_dict",
]

GRAPH_KEYS = ("name", "regions", "base", "moves", "comms")
# reduced instances carry these next to the graph keys
ENVELOPE_KEYS = ("node_key", "problem")


class GraphFormatError(ValueError):
    """Raised when a serialized graph cannot be turned into a valid TopologicGraph."""


@dataclass(frozen=True)
class TopologicGraph:
    labels: tuple[str, ...]
    base: int
    moves: frozenset[tuple[int, int]]
    comms: frozenset[tuple[int, int]]
    name: str | None = field(default=None, compare=False)

    @classmethod
    def build(
        cls,
        labels: Iterable[str],
        base: int,
        moves: Iterable[tuple[int, int]],
        comms: Iterable[tuple[int, int]],
        name: str | None = None,
        base_loop: bool = True,
    ) -> "TopologicGraph":
        """Construct a graph, symmetrizing comms and (by default) adding ``B -> B``."""
        labels = tuple(str(x) for x in labels)
        mv = {(int(a), int(b)) for a, b in moves}
        if base_loop:
            mv.add((base, base))
        cm: set[tuple[int, int]] = set()
        for a, b in comms:
            if a == b:
                raise GraphFormatError(f"self communication pair {labels[a]!r}")
            cm.add((int(a), int(b)))
            cm.add((int(b), int(a)))
        return cls(labels, int(base), frozenset(mv), frozenset(cm), name)

    @property
    def num_regions(self) -> int:
        return len(self.labels)

    @property
    def regions(self) -> range:
        return range(len(self.labels))

    @cached_property
    def index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    @cached_property
    def move_succ(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in self.labels]
        for a, b in self.moves:
            out[a].append(b)
        return tuple(tuple(sorted(x)) for x in out)

    @cached_property
    def move_pred(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in self.labels]
        for a, b in self.moves:
            out[b].append(a)
        return tuple(tuple(sorted(x)) for x in out)

    @cached_property
    def comm_mask(self) -> tuple[int, ...]:
        """Bitmask of communication neighbours for each region."""
        masks = [0] * len(self.labels)
        for a, b in self.comms:
            masks[a] |= 1 << b
        return tuple(masks)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.labels)) - 1

    def comm_neighbors(self, region: int) -> list[int]:
        m = self.comm_mask[region]
        return [r for r in range(len(self.labels)) if m >> r & 1]

    def comm_pairs(self) -> list[tuple[int, int]]:
        """Unordered communication pairs as sorted ``(a, b)`` with ``a < b``."""
        return sorted({(min(a, b), max(a, b)) for a, b in self.comms})

    def label(self, region: int) -> str:
        return self.labels[region]

    def region(self, label: str) -> int:
        try:
            return self.index[label]
        except KeyError:
            raise KeyError(f"unknown region {label!r}") from None


def validate_graph(g: TopologicGraph) -> list[str]:
    """Return a description of every structural violation; empty means valid."""
    problems: list[str] = []
    n = len(g.labels)
    if n == 0:
        return ["empty region set"]
    if len(set(g.labels)) != n:
        problems.append("duplicate region labels")
    if not 0 <= g.base < n:
        problems.append(f"base index {g.base} out of range")
        return problems
    for kind, rel in (("move", g.moves), ("comm", g.comms)):
        for a, b in sorted(rel):
            if not (0 <= a < n and 0 <= b < n):
                problems.append(f"dangling region index in {kind} pair ({a}, {b})")
    if (g.base, g.base) not in g.moves:
        problems.append("base not move-reflexive")
    for a, b in sorted(g.comms):
        if a == b:
            problems.append(f"self communication pair at region {a}")
        elif (b, a) not in g.comms:
            problems.append(f"asymmetric comm pair ({a}, {b})")
    return problems


def is_neighbor_communicable(g: TopologicGraph) -> bool:
    return all(a == b or (a, b) in g.comms for a, b in g.moves)


def neighbor_communicable_closure(g: TopologicGraph) -> TopologicGraph:
    extra = {(a, b) for a, b in g.moves if a != b}
    extra |= {(b, a) for a, b in extra}
    if extra <= g.comms:
        return g
    return TopologicGraph(g.labels, g.base, g.moves, g.comms | extra, g.name)


# -- serialization ---------------------------------------------------------


def _position(text: str, key: str) -> str:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    if m is None:
        return "unknown position"
    line = text.count("\n", 0, m.start()) + 1
    col = m.start() - (text.rfind("\n", 0, m.start()) + 1) + 1
    return f"line {line} column {col}"


def graph_to_dict(g: TopologicGraph) -> dict:
    d: dict = {}
    if g.name is not None:
        d["name"] = g.name
    d["regions"] = list(g.labels)
    d["base"] = g.labels[g.base]
    d["moves"] = [[g.labels[a], g.labels[b]] for a, b in sorted(g.moves)]
    d["comms"] = [[g.labels[a], g.labels[b]] for a, b in g.comm_pairs()]
    return d


def graph_from_dict(d: dict, text: str = "") -> TopologicGraph:
    if not isinstance(d, dict):
        raise GraphFormatError("instance must be a JSON object")
    for key in d:
        if key not in GRAPH_KEYS and key not in ENVELOPE_KEYS:
            raise GraphFormatError(f"unknown field {key!r} at {_position(text, key)}")
    for key in ("regions", "base", "moves", "comms"):
        if key not in d:
            raise GraphFormatError(f"missing required key {key!r}")
    regions = d["regions"]
    if not isinstance(regions, list) or not regions:
        raise GraphFormatError("'regions' must be a non-empty array of strings")
    if not all(isinstance(r, str) for r in regions):
        raise GraphFormatError("'regions' must contain only strings")
    seen: set[str] = set()
    for r in regions:
        if r in seen:
            raise GraphFormatError(f"duplicate region label {r!r}")
        seen.add(r)
    index = {r: i for i, r in enumerate(regions)}

    def lookup(lab, where: str) -> int:
        if not isinstance(lab, str) or lab not in index:
            raise GraphFormatError(f"{where} references unknown region {lab!r}")
        return index[lab]

    base = lookup(d["base"], "'base'")
    pairs = {}
    for key in ("moves", "comms"):
        raw = d[key]
        if not isinstance(raw, list):
            raise GraphFormatError(f"{key!r} must be an array of pairs")
        out = []
        for p in raw:
            if not isinstance(p, list) or len(p) != 2:
                raise GraphFormatError(f"{key!r} entries must be 2-element arrays, got {p!r}")
            a, b = lookup(p[0], key), lookup(p[1], key)
            if key == "comms" and a == b:
                raise GraphFormatError(f"self communication pair {p[0]!r}")
            out.append((a, b))
        pairs[key] = out
    name = d.get("name")
    if name is not None and not isinstance(name, str):
        raise GraphFormatError("'name' must be a string")
    g = TopologicGraph.build(regions, base, pairs["moves"], pairs["comms"], name=name, base_loop=False)
    if (base, base) not in g.moves:
        raise GraphFormatError(f"base {regions[base]!r} has no self-loop in 'moves'")
    return g


def parse_graph(text: str, format: str = "json") -> TopologicGraph:
    if format != "json":
        raise ValueError(f"unsupported format {format!r}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return graph_from_dict(data, text)


def serialize_graph(g: TopologicGraph, format: str = "json") -> str:
    if format != "json":
        raise ValueError(f"unsupported format {format!r}")
    return json.dumps(graph_to_dict(g), indent=1) + "\n"
