"""Emit instances for external planners and model checkers, and render plans.

Regions are written as ``r<index>`` and UAVs as ``u<k>`` (1-based) so that any
label survives the trip; every output starts with a comment mapping the names
back to region labels.  The grammars are described in ``docs/formats.md``.
"""
from __future__ import annotations

import re
from typing import Sequence

from .config import Configuration
from .graph import TopologicGraph
from .search import Plan, validate_plan

__all__ = [
    "InvalidPlan",
    "ExportError",
    "to_pddl",
    "to_smv",
    "to_dot",
    "parse_sexpr",
    "lint_pddl",
    "lint_smv",
]


class InvalidPlan(ValueError):
    pass


class ExportError(ValueError):
    pass


def _rname(r: int) -> str:
    return f"r{r}"


def _goal_target(g: TopologicGraph, n: int, goal: str, target) -> tuple[int, ...] | None:
    if goal == "cover":
        return None
    if goal != "reach":
        raise ExportError(f"unknown goal {goal!r}")
    if target is None:
        raise ExportError("reach goal needs a target")
    t = tuple(sorted(target))
    if len(t) != n:
        raise ExportError(f"target has {len(t)} UAVs, expected {n}")
    return t


def _key_comment(g: TopologicGraph, prefix: str) -> list[str]:
    lines = [f"{prefix} region names: " + ", ".join(f"{_rname(r)}={g.labels[r]}" for r in g.regions)]
    lines.append(f"{prefix} base: {_rname(g.base)}")
    return lines


# -- PDDL -------------------------------------------------------------------------

_PDDL_DOMAIN = """\
; Connected UAV fleet: one round = every UAV chooses a destination, then commit
; applies all moves at once.  The connectivity guard uses derived predicates,
; so the planner must support PDDL 2.2 axioms (:derived-predicates).
(define (domain uav-fleet)
 (:requirements :typing :negative-preconditions :disjunctive-preconditions
  :existential-preconditions :universal-preconditions :conditional-effects
  :derived-predicates)
 (:types uav region round)
 (:predicates
  (at ?u - uav ?r - region)
  (visited ?r - region)
  (move-adj ?a - region ?b - region)
  (comm-adj ?a - region ?b - region)
  (is-base ?r - region)
  (chosen ?u - uav)
  (dest ?u - uav ?r - region)
  (reserved ?r - region)
  (staged ?r - region)
  (linked ?r - region)
  (current ?s - round)
  (next-round ?s - round ?t - round)
  (bounded))
 (:derived (staged ?r - region)
  (exists (?u - uav) (dest ?u ?r)))
 (:derived (linked ?r - region)
  (or (is-base ?r)
      (and (staged ?r)
           (exists (?q - region) (and (comm-adj ?r ?q) (linked ?q))))))
 (:action choose
  :parameters (?u - uav ?from - region ?to - region)
  :precondition (and (at ?u ?from) (not (chosen ?u)) (move-adj ?from ?to)
                     (or (is-base ?to) (not (reserved ?to))))
  :effect (and (chosen ?u) (dest ?u ?to) (reserved ?to)))
 (:action commit
  :parameters (?s - round ?t - round)
  :precondition (and (forall (?u - uav) (chosen ?u))
                     (forall (?r - region) (or (not (staged ?r)) (linked ?r)))
                     (or (not (bounded)) (and (current ?s) (next-round ?s ?t))))
  :effect (and
   (forall (?u - uav ?r - region)
    (when (and (at ?u ?r) (not (dest ?u ?r))) (not (at ?u ?r))))
   (forall (?u - uav ?r - region)
    (when (dest ?u ?r) (and (at ?u ?r) (visited ?r) (not (dest ?u ?r)))))
   (forall (?u - uav) (not (chosen ?u)))
   (forall (?r - region) (not (reserved ?r)))
   (when (bounded) (and (not (current ?s)) (current ?t)))))
)
"""


def to_pddl(
    g: TopologicGraph,
    n: int,
    goal: str = "cover",
    target: Configuration | Sequence[int] | None = None,
    bound: int | None = None,
    name: str | None = None,
) -> tuple[str, str]:
    """Domain and problem text.

    ``goal`` is ``"cover"`` (every region visited, all UAVs home) or ``"reach"``
    (UAV ``u_k`` ends on the k-th smallest target region; UAVs are
    interchangeable so this loses nothing).  With ``bound`` the problem declares
    rounds ``s0..s<bound>`` and each commit consumes one.
    """
    if n < 1:
        raise ExportError("need at least one UAV")
    t = _goal_target(g, n, goal, target)
    uavs = [f"u{k}" for k in range(1, n + 1)]
    regions = [_rname(r) for r in g.regions]
    base = _rname(g.base)
    pname = re.sub(r"[^A-Za-z0-9_-]", "-", name or g.name or "instance")
    lines = [f"; {pname}"] + _key_comment(g, ";")
    lines.append(f"(define (problem {pname})")
    lines.append(" (:domain uav-fleet)")
    lines.append(" (:objects")
    lines.append("  " + " ".join(uavs) + " - uav")
    lines.append("  " + " ".join(regions) + " - region")
    # without a bound, commit runs with ?s = ?t = s0 and ignores the counter
    rounds = 1 if bound is None else bound + 1
    lines.append("  " + " ".join(f"s{i}" for i in range(rounds)) + " - round")
    lines.append(" )")
    init = [f"(is-base {base})", f"(visited {base})"]
    init += [f"(at {u} {base})" for u in uavs]
    init += [f"(move-adj {_rname(a)} {_rname(b)})" for a, b in sorted(g.moves)]
    init += [f"(comm-adj {_rname(a)} {_rname(b)})" for a, b in sorted(g.comms)]
    if bound is not None:
        init.append("(bounded)")
        init.append("(current s0)")
        init += [f"(next-round s{i} s{i + 1})" for i in range(bound)]
    lines.append(" (:init")
    lines += ["  " + x for x in init]
    lines.append(" )")
    # at and visited change only in commit, so a goal state is always a committed round
    if t is None:
        parts = [f"(visited {r})" for r in regions] + [f"(at {u} {base})" for u in uavs]
    else:
        parts = [f"(at {u} {_rname(r)})" for u, r in zip(uavs, t)]
    lines.append(" (:goal (and " + " ".join(parts) + "))")
    lines.append(")")
    return _PDDL_DOMAIN, "\n".join(lines) + "\n"


def parse_sexpr(text: str) -> list:
    """Parse PDDL text (``;`` comments allowed) into nested lists of atoms."""
    tokens = re.findall(r"\(|\)|[^\s()]+", re.sub(r";[^\n]*", "", text))
    stack: list[list] = [[]]
    for tok in tokens:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise ExportError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok.lower())
    if len(stack) != 1:
        raise ExportError("unbalanced '('")
    return stack[0]


def lint_pddl(domain: str, problem: str) -> list[str]:
    """Structural check of emitted PDDL; returns a list of problems (empty = fine)."""
    out = []
    try:
        dom = parse_sexpr(domain)
        prob = parse_sexpr(problem)
    except ExportError as exc:
        return [str(exc)]
    if len(dom) != 1 or dom[0][:1] != ["define"] or dom[0][1][:1] != ["domain"]:
        out.append("domain is not a single (define (domain ...)) form")
        return out
    if len(prob) != 1 or prob[0][:1] != ["define"] or prob[0][1][:1] != ["problem"]:
        out.append("problem is not a single (define (problem ...)) form")
        return out
    dname = dom[0][1][1]
    sections = {s[0]: s for s in prob[0][2:] if isinstance(s, list) and s}
    if sections.get(":domain", [None, None])[1] != dname:
        out.append("problem names a different domain")
    preds = {}
    for sec in dom[0][2:]:
        if sec and sec[0] == ":predicates":
            for p in sec[1:]:
                preds[p[0]] = len([x for x in p[1:] if x.startswith("?")])
    objects = set()
    for x in sections.get(":objects", [])[1:]:
        if x != "-":
            objects.add(x)
    for fact in sections.get(":init", [])[1:]:
        if fact[0] not in preds:
            out.append(f"unknown predicate {fact[0]!r} in :init")
        elif len(fact) - 1 != preds[fact[0]]:
            out.append(f"wrong arity for {fact[0]!r} in :init")
        for a in fact[1:]:
            if a not in objects:
                out.append(f"undeclared object {a!r} in :init")
    for key in (":objects", ":init", ":goal"):
        if key not in sections:
            out.append(f"problem lacks {key}")
    return out


# -- SMV --------------------------------------------------------------------------


def to_smv(
    g: TopologicGraph,
    n: int,
    goal: str = "cover",
    target: Configuration | Sequence[int] | None = None,
) -> str:
    """NuSMV model whose INVARSPEC is the negated goal.

    All UAVs move in the same transition.  Connectivity to the base is unrolled
    as ``|V|`` relay layers of plain boolean definitions.
    """
    if n < 1:
        raise ExportError("need at least one UAV")
    t = _goal_target(g, n, goal, target)
    R = list(g.regions)
    base = _rname(g.base)
    uavs = [f"u{k}" for k in range(1, n + 1)]
    dom = "{" + ", ".join(_rname(r) for r in R) + "}"
    lines = [f"-- {g.name or 'instance'}"] + _key_comment(g, "--")
    lines.append("MODULE main")
    lines.append("VAR")
    for u in uavs:
        lines.append(f"  {u} : {dom};")
    for r in R:
        lines.append(f"  vis_{_rname(r)} : boolean;")
    lines.append("DEFINE")
    for r in R:
        occ = " | ".join(f"{u} = {_rname(r)}" for u in uavs)
        lines.append(f"  occ_{_rname(r)} := {occ};")
    layers = max(1, len(R))
    for r in R:
        lines.append(f"  link0_{_rname(r)} := {'TRUE' if r == g.base else 'FALSE'};")
    for j in range(1, layers + 1):
        for r in R:
            nb = [f"link{j - 1}_{_rname(q)}" for q in sorted(g.comm_neighbors(r))]
            step = f"occ_{_rname(r)} & ({' | '.join(nb)})" if nb else "FALSE"
            lines.append(f"  link{j}_{_rname(r)} := link{j - 1}_{_rname(r)} | ({step});")
    conn = " & ".join(f"(occ_{_rname(r)} -> link{layers}_{_rname(r)})" for r in R)
    lines.append(f"  connected := {conn};")
    pairs = [f"!({a} = {b} & {a} != {base})" for i, a in enumerate(uavs) for b in uavs[i + 1:]]
    lines.append(f"  distinct := {' & '.join(pairs) if pairs else 'TRUE'};")
    if t is None:
        gl = [f"vis_{_rname(r)}" for r in R] + [f"{u} = {base}" for u in uavs]
    else:
        gl = [f"{u} = {_rname(r)}" for u, r in zip(uavs, t)]
    lines.append(f"  goal := {' & '.join(gl)};")
    lines.append("INIT")
    init = [f"{u} = {base}" for u in uavs] + [f"vis_{_rname(r)} = {'TRUE' if r == g.base else 'FALSE'}" for r in R]
    lines.append("  " + " & ".join(init))
    lines.append("INVAR")
    lines.append("  connected & distinct")
    lines.append("TRANS")
    trans = []
    for u in uavs:
        for r in R:
            succ = ", ".join(_rname(q) for q in sorted(g.move_succ[r]))
            trans.append(f"({u} = {_rname(r)} -> next({u}) in {{{succ}}})" if succ else f"{u} != {_rname(r)}")
    for r in R:
        nocc = " | ".join(f"next({u}) = {_rname(r)}" for u in uavs)
        trans.append(f"(next(vis_{_rname(r)}) <-> (vis_{_rname(r)} | {nocc}))")
    lines.append("  " + "\n  & ".join(trans))
    lines.append("INVARSPEC !goal")
    return "\n".join(lines) + "\n"


def lint_smv(text: str) -> list[str]:
    """Check that every identifier used in the model is declared or defined."""
    body = "\n".join(x for x in text.splitlines() if not x.startswith("--"))
    declared = set(re.findall(r"^\s+(\w+)\s*:(?!=)", body, re.M))
    defined = set(re.findall(r"^\s+(\w+)\s*:=", body, re.M))
    values = set()
    for m in re.finditer(r"\{([^}]*)\}", body):
        values.update(x.strip() for x in m.group(1).split(","))
    keywords = {"MODULE", "main", "VAR", "DEFINE", "INIT", "INVAR", "TRANS", "INVARSPEC",
                "boolean", "next", "in", "TRUE", "FALSE"}
    out = []
    for tok in sorted(set(re.findall(r"[A-Za-z_]\w*", body))):
        if tok not in declared | defined | values | keywords:
            out.append(f"undeclared identifier {tok!r}")
    if body.count("(") != body.count(")"):
        out.append("unbalanced parentheses")
    return out


# -- DOT --------------------------------------------------------------------------


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _dot_graph(g: TopologicGraph, title: str, occupied=None, visited=None) -> list[str]:
    occupied = occupied or {}
    visited = visited or set()
    active = set(occupied) | ({g.base} if occupied else set())
    lines = [f"digraph {_dot_id(title)} {{"]
    for r in g.regions:
        attrs = []
        label = g.labels[r]
        if r in visited:
            label += " ✓"
        if r in occupied:
            label += f" [{occupied[r]}]"
            attrs.append('style=filled fillcolor="lightblue"')
        if r == g.base:
            attrs.append("shape=doublecircle")
        attrs.insert(0, f"label={_dot_id(label)}")
        lines.append(f"  {r} [{' '.join(attrs)}];")
    for a, b in sorted(g.moves):
        lines.append(f"  {a} -> {b};")
    for a, b in g.comm_pairs():
        style = "dashed"
        if a in active and b in active:
            style += " penwidth=2 color=red"
        lines.append(f"  {a} -> {b} [dir=none style={style} constraint=false];")
    lines.append("}")
    return lines


def to_dot(g: TopologicGraph, plan: Plan | Sequence | None = None) -> str:
    """Graphviz text: one graph, or one graph per plan frame.

    Moves are solid arrows and communication pairs dashed lines; in frames, the
    communication links among occupied regions and the base are drawn bold,
    occupied regions show their UAV count and visited regions carry a check mark.
    """
    if plan is None:
        return "\n".join(_dot_graph(g, g.name or "graph")) + "\n"
    check = validate_plan(g, plan, goal=None)
    if not check:
        raise InvalidPlan(f"frame {check.frame}: {check.reason}")
    frames = [tuple(f) for f in plan]
    out = []
    seen: set[int] = set()
    for t, f in enumerate(frames):
        seen.update(f)
        occ: dict[int, int] = {}
        for p in f:
            occ[p] = occ.get(p, 0) + 1
        out += _dot_graph(g, f"frame {t}", occ, set(seen))
    return "\n".join(out) + "\n"
