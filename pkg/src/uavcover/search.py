"""Exact plan synthesis for Coverage, bCoverage, Reachability and bReachability.

All solvers are breadth-first over canonical configurations, so every returned
plan is a shortest one.  Coverage states pair a configuration with the bitset
of regions visited so far.
"""
from __future__ import annotations

import math
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .config import Configuration, configuration_violation, is_step, successor_tuples
from .graph import TopologicGraph

__all__ = [
    "Verdict",
    "Budget",
    "SearchStats",
    "Plan",
    "SolveOutcome",
    "SearchTimeout",
    "PlanCheck",
    "solve_reachability",
    "solve_breachability",
    "solve_coverage",
    "solve_bcoverage",
    "validate_plan",
    "min_uavs_for_coverage",
]


class Verdict(str, Enum):
    SOLVABLE = "solvable"
    UNSOLVABLE = "unsolvable"
    TIMEOUT = "timeout"


class SearchTimeout(Exception):
    """Raised when a search exceeds its time or state budget."""


@dataclass(frozen=True)
class Budget:
    timeout: float | None = None
    max_states: int | None = None


@dataclass
class SearchStats:
    expanded: int = 0
    frontier_peak: int = 0
    millis: float = 0.0

    def to_dict(self, timing: bool = True) -> dict:
        return {"expanded": self.expanded, "frontier_peak": self.frontier_peak,
                "millis": round(self.millis, 3) if timing else 0}


@dataclass(frozen=True)
class Plan:
    steps: tuple[Configuration, ...]

    @property
    def length(self) -> int:
        return len(self.steps) - 1

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __getitem__(self, i):
        return self.steps[i]

    def to_labels(self, g: TopologicGraph) -> list[list[str]]:
        return [c.labels(g) for c in self.steps]

    @classmethod
    def from_labels(cls, g: TopologicGraph, frames: Sequence[Sequence[str]]) -> "Plan":
        return cls(tuple(Configuration(tuple(sorted(g.region(x) for x in f))) for f in frames))


@dataclass
class SolveOutcome:
    verdict: Verdict
    plan: Plan | None = None
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def solvable(self) -> bool:
        return self.verdict is Verdict.SOLVABLE


class _Clock:
    def __init__(self, budget: Budget | None):
        self.budget = budget or Budget()
        self.t0 = time.perf_counter()
        self.stats = SearchStats()

    def tick(self) -> None:
        s = self.stats
        s.expanded += 1
        b = self.budget
        if b.max_states is not None and s.expanded > b.max_states:
            raise SearchTimeout("state budget exhausted")
        if b.timeout is not None and s.expanded % 128 == 0:
            if time.perf_counter() - self.t0 > b.timeout:
                raise SearchTimeout("time budget exhausted")

    def frontier(self, size: int) -> None:
        if size > self.stats.frontier_peak:
            self.stats.frontier_peak = size

    def done(self, verdict: Verdict, plan: Plan | None = None) -> SolveOutcome:
        self.stats.millis = (time.perf_counter() - self.t0) * 1000.0
        return SolveOutcome(verdict, plan, self.stats)


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError("need at least one UAV")


# -- reachability ----------------------------------------------------------------


def solve_reachability(
    g: TopologicGraph,
    n: int,
    target: Configuration | Sequence[int],
    bound: int | None = None,
    budget: Budget | None = None,
) -> SolveOutcome:
    """Shortest execution from the all-base configuration to ``target``.

    A target that is not a configuration (shared non-base region, or cut off
    from the base) is reported as unsolvable: no execution ends there.
    """
    _check_n(n)
    goal = tuple(sorted(target))
    if len(goal) != n:
        raise ValueError(f"target has {len(goal)} UAVs, expected {n}")
    if any(not 0 <= p < g.num_regions for p in goal):
        raise ValueError("target references a region out of range")
    clock = _Clock(budget)
    if configuration_violation(g, goal):
        return clock.done(Verdict.UNSOLVABLE)
    start = (g.base,) * n
    if goal == start:
        return clock.done(Verdict.SOLVABLE, Plan((Configuration(start),)))
    lower = _reach_lower_bound(g, goal) if bound is not None else None
    parent: dict[tuple[int, ...], tuple[int, ...] | None] = {start: None}
    frontier = [start]
    depth = 0
    try:
        while frontier and (bound is None or depth < bound):
            nxt = []
            for c in frontier:
                clock.tick()
                for c2 in successor_tuples(g, c):
                    if c2 in parent:
                        continue
                    parent[c2] = c
                    if c2 == goal:
                        return clock.done(Verdict.SOLVABLE, _unwind(parent, c2))
                    if lower is not None and depth + 1 + lower(c2) > bound:
                        continue
                    nxt.append(c2)
            clock.frontier(len(nxt))
            frontier = nxt
            depth += 1
    except SearchTimeout:
        return clock.done(Verdict.TIMEOUT)
    return clock.done(Verdict.UNSOLVABLE)


def _move_distances_to(g: TopologicGraph, target: int) -> list[float]:
    dist = [math.inf] * g.num_regions
    dist[target] = 0
    queue = deque([target])
    while queue:
        r = queue.popleft()
        for p in g.move_pred[r]:
            if dist[p] == math.inf:
                dist[p] = dist[r] + 1
                queue.append(p)
    return dist


def _reach_lower_bound(g: TopologicGraph, goal: tuple[int, ...]):
    """Steps still needed from a configuration: every UAV must reach some target
    region and every target region must be reached by some UAV."""
    to = {t: _move_distances_to(g, t) for t in set(goal)}

    def lower(c) -> float:
        lb = 0
        for p in c:
            lb = max(lb, min(d[p] for d in to.values()))
        for d in to.values():
            lb = max(lb, min(d[p] for p in c))
        return lb

    return lower


def solve_breachability(g, n, target, bound: int, budget: Budget | None = None) -> SolveOutcome:
    return solve_reachability(g, n, target, bound=bound, budget=budget)


def _unwind(parent: dict, last, keyed: bool = False) -> Plan:
    seq = []
    cur = last
    while cur is not None:
        seq.append(cur[0] if keyed else cur)
        cur = parent[cur]
    seq.reverse()
    return Plan(tuple(Configuration(c) for c in seq))


# -- coverage ----------------------------------------------------------------------


def _config_graph(g: TopologicGraph, start: tuple[int, ...], clock: _Clock, depth_limit: int | None):
    """Forward-reachable configurations with their successor lists and distance from start."""
    succ: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    dist = {start: 0}
    queue = deque([start])
    while queue:
        c = queue.popleft()
        if depth_limit is not None and dist[c] >= depth_limit:
            succ[c] = []
            continue
        clock.tick()
        out = successor_tuples(g, c)
        succ[c] = out
        for c2 in out:
            if c2 not in dist:
                dist[c2] = dist[c] + 1
                queue.append(c2)
    return succ, dist


def _distance_home(succ: dict, start) -> dict:
    pred: dict = {c: [] for c in succ}
    for c, out in succ.items():
        for c2 in out:
            pred[c2].append(c)
    home = {start: 0}
    queue = deque([start])
    while queue:
        c = queue.popleft()
        for p in pred[c]:
            if p not in home:
                home[p] = home[c] + 1
                queue.append(p)
    return home


def _mask(c) -> int:
    m = 0
    for p in c:
        m |= 1 << p
    return m


def solve_coverage(
    g: TopologicGraph,
    n: int,
    bound: int | None = None,
    budget: Budget | None = None,
) -> SolveOutcome:
    """Shortest covering execution (all-base to all-base, every region visited).

    Only configurations from which the all-base configuration is reachable can
    lie on a covering execution, so the search is restricted to those.  A state
    whose visited set is included in the visited set of an earlier state with the
    same configuration is dropped: the earlier one reaches the goal no later.
    """
    _check_n(n)
    clock = _Clock(budget)
    start = (g.base,) * n
    full = g.full_mask
    start_mask = 1 << g.base
    if start_mask == full:
        return clock.done(Verdict.SOLVABLE, Plan((Configuration(start),)))
    try:
        succ, dist = _config_graph(g, start, clock, bound)
        home = _distance_home(succ, start)
        useful = {c for c in succ if c in home and (bound is None or dist[c] + home[c] <= bound)}
        cover = 0
        for c in useful:
            cover |= _mask(c)
        if cover != full:
            return clock.done(Verdict.UNSOLVABLE)
        # h[r]: fewest steps home from any useful configuration occupying r
        h = [None] * g.num_regions
        for c in useful:
            for p in set(c):
                if h[p] is None or home[c] < h[p]:
                    h[p] = home[c]

        def lower_bound(c, m) -> int:
            lb = home[c]
            rest = full & ~m
            while rest:
                low = rest & -rest
                rest ^= low
                v = h[low.bit_length() - 1] + 1
                if v > lb:
                    lb = v
            return lb

        root = (start, start_mask)
        parent: dict = {root: None}
        seen: dict[tuple[int, ...], list[int]] = {start: [start_mask]}
        frontier = [root]
        depth = 0
        while frontier and (bound is None or depth < bound):
            nxt = []
            for state in frontier:
                c, m = state
                clock.tick()
                for c2 in succ[c]:
                    if c2 not in useful:
                        continue
                    m2 = m | _mask(c2)
                    if c2 == start and m2 == full:
                        parent[(c2, m2)] = state
                        return clock.done(Verdict.SOLVABLE, _unwind(parent, (c2, m2), keyed=True))
                    if bound is not None and depth + 1 + lower_bound(c2, m2) > bound:
                        continue
                    masks = seen.get(c2)
                    if masks is None:
                        seen[c2] = [m2]
                    else:
                        if any(x | m2 == x for x in masks):
                            continue
                        masks[:] = [x for x in masks if x | m2 != m2]
                        masks.append(m2)
                    parent[(c2, m2)] = state
                    nxt.append((c2, m2))
            clock.frontier(len(nxt))
            frontier = nxt
            depth += 1
    except SearchTimeout:
        return clock.done(Verdict.TIMEOUT)
    return clock.done(Verdict.UNSOLVABLE)


def solve_bcoverage(g, n, bound: int, budget: Budget | None = None) -> SolveOutcome:
    return solve_coverage(g, n, bound=bound, budget=budget)


def min_uavs_for_coverage(g: TopologicGraph, n_max: int, budget: Budget | None = None) -> int | None:
    """Smallest UAV count in ``1..n_max`` admitting a covering execution."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    for n in range(1, n_max + 1):
        out = solve_coverage(g, n, budget=budget)
        if out.verdict is Verdict.TIMEOUT:
            raise SearchTimeout(f"timed out at n={n}")
        if out.solvable:
            return n
    return None


# -- plan checking -------------------------------------------------------------------


@dataclass(frozen=True)
class PlanCheck:
    ok: bool
    frame: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def validate_plan(
    g: TopologicGraph,
    plan: Plan | Sequence,
    goal: str | None = "cover",
    target: Configuration | Sequence[int] | None = None,
    bound: int | None = None,
) -> PlanCheck:
    """Check a plan frame by frame.

    ``goal`` is ``"cover"``, ``"reach"`` (with ``target``) or None, which checks
    only that the plan is an execution starting at the base.
    """
    frames = [tuple(f) for f in plan]
    if not frames:
        return PlanCheck(False, None, "empty plan")
    n = len(frames[0])
    if n < 1:
        return PlanCheck(False, 0, "no UAVs")
    for t, f in enumerate(frames):
        if len(f) != n:
            return PlanCheck(False, t, f"frame has {len(f)} UAVs, expected {n}")
        bad = configuration_violation(g, f)
        if bad:
            return PlanCheck(False, t, bad)
        if t > 0 and not is_step(g, frames[t - 1], f):
            return PlanCheck(False, t, "no joint move from the previous frame")
    home = (g.base,) * n
    if tuple(sorted(frames[0])) != home:
        return PlanCheck(False, 0, "plan does not start with all UAVs at the base")
    if bound is not None and len(frames) - 1 > bound:
        return PlanCheck(False, len(frames) - 1, f"plan has {len(frames) - 1} steps, bound is {bound}")
    if goal == "cover":
        if tuple(sorted(frames[-1])) != home:
            return PlanCheck(False, len(frames) - 1, "plan does not end with all UAVs at the base")
        seen = set()
        for f in frames:
            seen.update(f)
        missing = [g.labels[r] for r in g.regions if r not in seen]
        if missing:
            return PlanCheck(False, None, f"regions never visited: {', '.join(missing)}")
    elif goal is None:
        pass
    elif goal == "reach":
        if target is None:
            raise ValueError("reach goal needs a target")
        if tuple(sorted(frames[-1])) != tuple(sorted(target)):
            return PlanCheck(False, len(frames) - 1, "plan does not end at the target")
    else:
        raise ValueError(f"unknown goal {goal!r}")
    return PlanCheck(True)
