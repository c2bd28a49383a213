"""Configurations of interchangeable UAVs and the synchronous step relation.

A configuration is kept as a sorted tuple of region indices, so two
placements that differ only by a permutation of UAVs are the same value.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .graph import TopologicGraph

__all__ = [
    "ConfigurationError",
    "DuplicateNonBase",
    "DisconnectedFromBase",
    "Configuration",
    "CoverageState",
    "make_configuration",
    "all_base",
    "is_connected_to_base",
    "is_step",
    "successors",
    "configuration_violation",
]


class ConfigurationError(ValueError):
    pass


class DuplicateNonBase(ConfigurationError):
    pass


class DisconnectedFromBase(ConfigurationError):
    pass


@dataclass(frozen=True, order=True)
class Configuration:
    positions: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.positions)

    def __iter__(self):
        return iter(self.positions)

    def __len__(self) -> int:
        return len(self.positions)

    def occupied(self) -> frozenset[int]:
        return frozenset(self.positions)

    def labels(self, g: TopologicGraph) -> list[str]:
        return [g.labels[p] for p in self.positions]

    @classmethod
    def from_labels(cls, g: TopologicGraph, labels: Iterable[str]) -> "Configuration":
        return make_configuration(g, [g.region(x) for x in labels])


@dataclass(frozen=True)
class CoverageState:
    config: Configuration
    visited: frozenset[int]


def _mask(positions: Iterable[int]) -> int:
    m = 0
    for p in positions:
        m |= 1 << p
    return m


def _connected_mask(g: TopologicGraph, occupied_mask: int) -> bool:
    allowed = occupied_mask | (1 << g.base)
    comm = g.comm_mask
    reached = 1 << g.base
    frontier = reached
    while frontier:
        low = frontier & -frontier
        frontier ^= low
        new = comm[low.bit_length() - 1] & allowed & ~reached
        reached |= new
        frontier |= new
    return reached == allowed


def is_connected_to_base(g: TopologicGraph, occupied: Iterable[int]) -> bool:
    """True iff ``occupied`` plus the base induce a connected communication subgraph."""
    return _connected_mask(g, _mask(occupied))


def configuration_violation(g: TopologicGraph, positions: Sequence[int]) -> str | None:
    """Describe why ``positions`` is not a configuration of ``g``, or None if it is."""
    n = g.num_regions
    for p in positions:
        if not 0 <= p < n:
            return f"region index {p} out of range"
    seen: set[int] = set()
    for p in positions:
        if p != g.base:
            if p in seen:
                return f"two UAVs share non-base region {g.labels[p]!r}"
            seen.add(p)
    if not _connected_mask(g, _mask(positions)):
        return "occupied regions are not connected to the base"
    return None


def make_configuration(g: TopologicGraph, raw_positions: Iterable[int]) -> Configuration:
    pos = tuple(sorted(int(p) for p in raw_positions))
    for p in pos:
        if not 0 <= p < g.num_regions:
            raise ConfigurationError(f"region index {p} out of range")
    for a, b in zip(pos, pos[1:]):
        if a == b and a != g.base:
            raise DuplicateNonBase(f"two UAVs share non-base region {g.labels[a]!r}")
    if not _connected_mask(g, _mask(pos)):
        raise DisconnectedFromBase("occupied regions are not connected to the base")
    return Configuration(pos)


def all_base(g: TopologicGraph, n: int) -> Configuration:
    return Configuration((g.base,) * n)


def _perfect_matching(left: Sequence[int], right: Sequence[int], adj) -> bool:
    """Kuhn's augmenting-path matching; ``adj(a, b)`` tells whether a may map to b."""
    if len(left) != len(right):
        return False
    match_of_right = [-1] * len(right)

    def augment(i: int, seen: list[bool]) -> bool:
        for j, b in enumerate(right):
            if not seen[j] and adj(left[i], b):
                seen[j] = True
                if match_of_right[j] < 0 or augment(match_of_right[j], seen):
                    match_of_right[j] = i
                    return True
        return False

    for i in range(len(left)):
        if not augment(i, [False] * len(right)):
            return False
    return True


def is_step(g: TopologicGraph, c: Configuration | Sequence[int], c2: Configuration | Sequence[int]) -> bool:
    """True iff some assignment of UAVs moves every one of them along a move edge."""
    a = tuple(c)
    b = tuple(c2)
    moves = g.moves
    return _perfect_matching(a, b, lambda x, y: (x, y) in moves)


def _reaches_all(g: TopologicGraph, allowed: int, required: int) -> bool:
    """True iff every region of ``required`` is comm-reachable from the base inside ``allowed``."""
    comm = g.comm_mask
    reached = 1 << g.base
    frontier = reached
    while frontier:
        if required & ~reached == 0:
            return True
        low = frontier & -frontier
        frontier ^= low
        new = comm[low.bit_length() - 1] & allowed & ~reached
        reached |= new
        frontier |= new
    return required & ~reached == 0


def successor_tuples(g: TopologicGraph, c: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Sorted list of canonical successor tuples of the canonical tuple ``c``.

    UAVs off the base are assigned destinations one at a time; a partial
    assignment is dropped as soon as some placed UAV cannot be linked to the
    base even through every region the remaining UAVs could still reach.
    """
    base = g.base
    succ = g.move_succ
    movers = [p for p in c if p != base]
    at_base = len(c) - len(movers)
    base_out = [q for q in succ[base] if q != base]
    base_out_mask = _mask(base_out) if at_base else 0
    # future[i]: regions reachable by movers i.. plus UAVs still at the base
    future = [0] * (len(movers) + 1)
    future[-1] = base_out_mask | (1 << base)
    for i in range(len(movers) - 1, -1, -1):
        future[i] = future[i + 1] | _mask(succ[movers[i]])
    comm = g.comm_mask
    found: set[tuple[int, ...]] = set()
    chosen: list[int] = []
    used: set[int] = set()

    def finish() -> None:
        free = [q for q in base_out if q not in used]
        placed = _mask(chosen)
        for r in range(min(at_base, len(free)) + 1):
            for extra in combinations(free, r):
                pos = tuple(sorted(chosen + list(extra) + [base] * (at_base - r)))
                if pos not in found and _connected_mask(g, placed | _mask(extra)):
                    found.add(pos)

    def place(i: int, placed: int) -> None:
        if i == len(movers):
            finish()
            return
        for q in succ[movers[i]]:
            if q != base and q in used:
                continue
            now = placed | (1 << q)
            if q != base:
                allowed = now | future[i + 1]
                if not comm[q] & allowed or not _reaches_all(g, allowed, now):
                    continue
            chosen.append(q)
            if q != base:
                used.add(q)
            place(i + 1, now)
            chosen.pop()
            used.discard(q)

    place(0, 0)
    return sorted(found)


def successors(g: TopologicGraph, c: Configuration) -> set[Configuration]:
    return {Configuration(p) for p in successor_tuples(g, tuple(c))}
