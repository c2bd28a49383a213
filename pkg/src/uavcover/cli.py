"""Command-line front end.

Exit status: 0 solvable / pass, 1 unsolvable / fail, 2 timeout, 3 usage or I/O error.
The default search timeout is 300 s; ``UAVCOVER_TIMEOUT`` overrides it and
``--timeout 0`` disables it.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import Configuration
from .export import InvalidPlan, to_dot, to_pddl, to_smv
from .generate import FAMILIES, experiment_suite, load_suite, write_suite, RNG_NAME
from .graph import GraphFormatError, TopologicGraph, graph_from_dict
from .reductions import (
    ReductionError,
    ReductionOutput,
    breachability_to_bcoverage,
    breachability_to_bcoverage_nc,
    corridor_to_reachability,
    corridor_to_reachability_nc,
    reachability_to_coverage,
    reachability_to_coverage_nc,
    square_to_breachability,
    square_to_breachability_nc,
)
from .search import Budget, Plan, Verdict, solve_coverage, solve_reachability, validate_plan
from .tiling import (
    SquareInstance,
    TilingFormatError,
    parse_tiling_instance,
    solve_corridor_tiling,
    solve_square_tiling,
)

EXIT_OK, EXIT_NO, EXIT_TIMEOUT, EXIT_USAGE = 0, 1, 2, 3
DEFAULT_TIMEOUT = 300.0
TIMEOUT_ENV = "UAVCOVER_TIMEOUT"
EXIT_FOR = {Verdict.SOLVABLE: EXIT_OK, Verdict.UNSOLVABLE: EXIT_NO, Verdict.TIMEOUT: EXIT_TIMEOUT}


class UsageError(Exception):
    pass


def default_timeout() -> float:
    raw = os.environ.get(TIMEOUT_ENV)
    if raw is None:
        return DEFAULT_TIMEOUT
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"{TIMEOUT_ENV} must be a number of seconds, got {raw!r}") from None


def _budget(timeout: float | None) -> Budget:
    t = default_timeout() if timeout is None else timeout
    return Budget(timeout=t if t > 0 else None)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _dump(obj) -> str:
    return json.dumps(obj, indent=1) + "\n"


def load_instance(path: str) -> tuple[TopologicGraph, dict]:
    """Graph plus its ``problem`` envelope (empty dict when absent)."""
    text = _read(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        g = graph_from_dict(data, text)
    except GraphFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None
    return g, dict(data.get("problem") or {})


def _parse_cfg(g: TopologicGraph, raw) -> Configuration:
    labels = raw.split(",") if isinstance(raw, str) else list(raw)
    try:
        return Configuration(tuple(sorted(g.region(x.strip() if isinstance(x, str) else x) for x in labels)))
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None


def load_plan(g: TopologicGraph, path: str) -> Plan:
    text = _read(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON: {exc.msg}") from None
    frames = data.get("plan") if isinstance(data, dict) else data
    if not isinstance(frames, list) or not all(isinstance(f, list) for f in frames):
        raise UsageError(f"{path}: a plan is an array of configurations (arrays of region labels)")
    try:
        return Plan.from_labels(g, frames)
    except KeyError as exc:
        raise UsageError(f"{path}: {exc.args[0]}") from None


# -- solve ----------------------------------------------------------------------------


def _problem_args(args, g: TopologicGraph, env: dict):
    problem = args.problem or {"coverage": "coverage", "bcoverage": "coverage",
                               "reachability": "reachability",
                               "breachability": "reachability"}.get(env.get("kind"), None)
    if problem is None:
        raise UsageError("--problem is required (the instance carries no problem envelope)")
    n = args.n if args.n is not None else env.get("n")
    if n is None:
        raise UsageError("--n is required")
    if n < 1:
        raise UsageError("--n must be at least 1")
    bound = args.bound if args.bound is not None else env.get("bound")
    target = None
    if problem == "reachability":
        raw = args.target if args.target is not None else env.get("target")
        if raw is None:
            raise UsageError("reachability needs --target")
        target = _parse_cfg(g, raw)
        if len(target) != n:
            raise UsageError(f"target has {len(target)} UAVs, --n is {n}")
    return problem, n, bound, target


def cmd_solve(args) -> int:
    g, env = load_instance(args.instance)
    problem, n, bound, target = _problem_args(args, g, env)
    budget = _budget(args.timeout)
    if problem == "coverage":
        out = solve_coverage(g, n, bound=bound, budget=budget)
    else:
        out = solve_reachability(g, n, target, bound=bound, budget=budget)
    report = {
        "instance": g.name,
        "problem": problem,
        "n": n,
        "bound": bound,
        "target": None if target is None else target.labels(g),
        "verdict": out.verdict.value,
        "length": None if out.plan is None else out.plan.length,
        "plan": None if out.plan is None else out.plan.to_labels(g),
        "stats": out.stats.to_dict(timing=args.timing),
    }
    _write(args.output, _dump(report))
    if args.plan_out and out.plan is not None:
        _write(args.plan_out, _dump(out.plan.to_labels(g)))
    return EXIT_FOR[out.verdict]


# -- tile -----------------------------------------------------------------------------


def cmd_tile(args) -> int:
    try:
        inst = parse_tiling_instance(_read(args.instance), kind=args.kind)
    except TilingFormatError as exc:
        raise UsageError(f"{args.instance}: {exc}") from None
    kind = "square" if isinstance(inst, SquareInstance) else "corridor"
    sol = solve_square_tiling(inst) if kind == "square" else solve_corridor_tiling(inst)
    report = {"kind": kind, "verdict": "solvable" if sol else "unsolvable",
              "tiling": None if sol is None else [list(r) for r in sol.rows]}
    _write(args.output, _dump(report))
    return EXIT_OK if sol else EXIT_NO


# -- reduce ---------------------------------------------------------------------------


def _reduced_from_dict(data: dict, g: TopologicGraph) -> ReductionOutput:
    prob = data.get("problem") or {}
    target = prob.get("target")
    key = data.get("node_key") or {}
    tags = tuple(tuple(key.get(lab, ["g", lab])) for lab in g.labels)
    return ReductionOutput(prob.get("kind", ""), g, int(prob.get("n", 0)),
                           None if target is None else _parse_cfg(g, target), prob.get("bound"), tags)


def cmd_reduce(args) -> int:
    text = _read(args.instance)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.instance}: malformed JSON: {exc.msg}") from None
    kind, nc = args.kind, args.nc
    try:
        if kind in ("corridor-reach", "square-breach") or (kind == "breach-bcover" and "tiles" in data):
            inst = parse_tiling_instance(text, kind="corridor" if kind == "corridor-reach" else "square")
            if kind == "corridor-reach":
                red = (corridor_to_reachability_nc if nc else corridor_to_reachability)(inst, literal=args.literal)
            else:
                red = (square_to_breachability_nc if nc else square_to_breachability)(inst)
                if kind == "breach-bcover":
                    red = (breachability_to_bcoverage_nc if nc else breachability_to_bcoverage)(red)
        else:
            g, env = load_instance(args.instance)
            if kind == "reach-cover":
                raw = args.target if args.target is not None else env.get("target")
                if raw is None:
                    raise UsageError("reach-cover needs a target (--target or the problem envelope)")
                red = (reachability_to_coverage_nc if nc else reachability_to_coverage)(g, _parse_cfg(g, raw))
            else:
                src = _reduced_from_dict(data, g)
                red = (breachability_to_bcoverage_nc if nc else breachability_to_bcoverage)(src)
    except (TilingFormatError, ReductionError) as exc:
        raise UsageError(f"{args.instance}: {exc}") from None
    _write(args.output, red.to_json())
    return EXIT_OK


# -- gen ------------------------------------------------------------------------------


def cmd_gen(args) -> int:
    fams = list(FAMILIES) if args.family == ["all"] else args.family
    items = []
    for fam in fams:
        if fam not in FAMILIES:
            raise UsageError(f"unknown family {fam!r}; choose from {', '.join(FAMILIES)} or all")
        items += experiment_suite(fam, args.size, args.count, args.seed, args.edge_prob_move, args.edge_prob_comm)
    params = {"families": fams, "sizes": list(args.size), "count": args.count, "seed": args.seed,
              "edge_prob_move": args.edge_prob_move, "edge_prob_comm": args.edge_prob_comm}
    try:
        path = write_suite(args.out, items, params)
    except OSError as exc:
        raise UsageError(f"cannot write suite: {exc}") from None
    print(f"wrote {len(items)} instances to {path.parent} ({RNG_NAME})")
    return EXIT_OK


# -- export ---------------------------------------------------------------------------


def cmd_export(args) -> int:
    g, env = load_instance(args.instance)
    fmt = args.format
    if fmt == "dot":
        plan = load_plan(g, args.plan) if args.plan else None
        try:
            text = to_dot(g, plan)
        except InvalidPlan as exc:
            print(f"invalid plan: {exc}", file=sys.stderr)
            return EXIT_NO
        _write(args.output, text)
        return EXIT_OK
    n = args.n if args.n is not None else env.get("n")
    if n is None:
        raise UsageError("--n is required for pddl/smv export")
    goal = args.goal or ("reach" if env.get("kind") in ("reachability", "breachability") else "cover")
    target = None
    if goal == "reach":
        raw = args.target if args.target is not None else env.get("target")
        if raw is None:
            raise UsageError("reach export needs --target")
        target = _parse_cfg(g, raw)
    if fmt == "pddl":
        bound = args.bound if args.bound is not None else env.get("bound")
        domain, problem = to_pddl(g, n, goal, target, bound)
        if args.output in (None, "-"):
            sys.stdout.write(domain + "\n" + problem)
        else:
            _write(args.output + ".domain.pddl", domain)
            _write(args.output + ".problem.pddl", problem)
    else:
        _write(args.output, to_smv(g, n, goal, target))
    return EXIT_OK


# -- validate -------------------------------------------------------------------------


def cmd_validate(args) -> int:
    g, env = load_instance(args.instance)
    plan = load_plan(g, args.plan)
    target = None
    if args.goal == "reach":
        raw = args.target if args.target is not None else env.get("target")
        if raw is None:
            raise UsageError("reach validation needs --target")
        target = _parse_cfg(g, raw)
    res = validate_plan(g, plan, goal=args.goal, target=target, bound=args.bound)
    if res:
        print(f"pass: {plan.length} steps")
        return EXIT_OK
    where = "plan" if res.frame is None else f"frame {res.frame}"
    print(f"fail: {where}: {res.reason}")
    return EXIT_NO


# -- bench ----------------------------------------------------------------------------


def _bench_one(job):
    path, n, timeout = job
    g, _ = load_instance(path)
    t0 = time.perf_counter()
    out = solve_coverage(g, n, budget=Budget(timeout=timeout))
    secs = time.perf_counter() - t0
    valid = None
    if out.plan is not None:
        valid = bool(validate_plan(g, out.plan))
    return out.verdict.value, secs, None if out.plan is None else out.plan.length, valid, out.stats.expanded


def run_bench(suite: str, timeout: float | None, jobs: int = 1, timing: bool = True) -> dict:
    manifest, _ = load_suite(suite)
    entries = manifest["instances"]
    work = [(str(Path(suite) / e["file"]), e["n"], timeout) for e in entries]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_bench_one, work))
    else:
        results = [_bench_one(w) for w in work]
    rows: dict[tuple[str, int], dict] = {}
    instances = []
    for e, (verdict, secs, length, valid, expanded) in zip(entries, results):
        row = rows.setdefault((e["family"], e["size"]), {
            "family": e["family"], "size": e["size"], "n": e["n"], "total": 0,
            "yes": 0, "yes_time": 0.0, "no": 0, "no_time": 0.0, "timeout": 0, "invalid_plans": 0})
        row["total"] += 1
        if verdict == "solvable":
            row["yes"] += 1
            row["yes_time"] += secs
            row["invalid_plans"] += 0 if valid else 1
        elif verdict == "unsolvable":
            row["no"] += 1
            row["no_time"] += secs
        else:
            row["timeout"] += 1
        instances.append({"file": e["file"], "verdict": verdict, "length": length, "plan_valid": valid,
                          "expanded": expanded, "seconds": round(secs, 3) if timing else 0})
    table = []
    for row in rows.values():
        for key in ("yes", "no"):
            t = row.pop(key + "_time")
            row[key + "_mean_s"] = round(t / row[key], 3) if row[key] and timing else 0
        table.append(row)
    return {"suite": str(suite), "timeout": timeout, "rows": table, "instances": instances}


def format_table(report: dict) -> str:
    head = ["family", "|V|", "n", "yes", "time", "no", "time", "To"]
    body = [[r["family"], str(r["size"]), str(r["n"]), str(r["yes"]), f"{r['yes_mean_s']:.3f}",
             str(r["no"]), f"{r['no_mean_s']:.3f}", str(r["timeout"])] for r in report["rows"]]
    widths = [max(len(x[i]) for x in [head] + body) for i in range(len(head))]
    fmt = lambda cells: "  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(cells, widths)))
    lines = [fmt(head), "  ".join("-" * w for w in widths)] + [fmt(b) for b in body]
    return "\n".join(lines) + "\n"


def cmd_bench(args) -> int:
    timeout = default_timeout() if args.timeout is None else args.timeout
    try:
        report = run_bench(args.suite, timeout if timeout > 0 else None, args.jobs, timing=args.timing)
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read suite {args.suite}: {exc}") from None
    sys.stdout.write(format_table(report))
    if args.json:
        _write(args.json, _dump(report))
    bad = sum(r["invalid_plans"] for r in report["rows"])
    return EXIT_NO if bad else EXIT_OK


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uavcover", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="decide coverage or reachability and print a plan")
    s.add_argument("--instance", required=True)
    s.add_argument("--problem", choices=["coverage", "reachability"])
    s.add_argument("--n", type=int)
    s.add_argument("--target", help="comma-separated region labels")
    s.add_argument("--bound", type=int)
    s.add_argument("--timeout", type=float, help=f"seconds (default {DEFAULT_TIMEOUT:g} or ${TIMEOUT_ENV}; 0 = none)")
    s.add_argument("--plan-out")
    s.add_argument("-o", "--output")
    s.add_argument("--timing", action="store_true", help="report wall time (output no longer byte-stable)")
    s.set_defaults(func=cmd_solve)

    t = sub.add_parser("tile", help="solve a square or corridor tiling instance")
    t.add_argument("--instance", required=True)
    t.add_argument("--kind", choices=["square", "corridor"])
    t.add_argument("-o", "--output")
    t.set_defaults(func=cmd_tile)

    r = sub.add_parser("reduce", help="build a reduction gadget")
    r.add_argument("--instance", required=True)
    r.add_argument("--kind", required=True, choices=["corridor-reach", "square-breach", "reach-cover", "breach-bcover"])
    r.add_argument("--nc", action="store_true", help="neighbour-communicable variant")
    r.add_argument("--literal", action="store_true", help="corridor gadget without the entry stage")
    r.add_argument("--target", help="reach-cover target, comma-separated labels")
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_reduce)

    g = sub.add_parser("gen", help="generate an experiment suite")
    g.add_argument("--family", nargs="+", default=["all"])
    g.add_argument("--size", type=int, nargs="+", default=[5, 10, 15, 20])
    g.add_argument("--count", type=int, default=100)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--edge-prob-move", type=float, default=0.3)
    g.add_argument("--edge-prob-comm", type=float, default=0.3)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("export", help="write PDDL, SMV or DOT")
    e.add_argument("--instance", required=True)
    e.add_argument("--format", required=True, choices=["pddl", "smv", "dot"])
    e.add_argument("--plan")
    e.add_argument("--n", type=int)
    e.add_argument("--goal", choices=["cover", "reach"])
    e.add_argument("--target")
    e.add_argument("--bound", type=int)
    e.add_argument("-o", "--output", help="output path (pddl: prefix for .domain.pddl/.problem.pddl)")
    e.set_defaults(func=cmd_export)

    v = sub.add_parser("validate", help="check a plan")
    v.add_argument("--instance", required=True)
    v.add_argument("--plan", required=True)
    v.add_argument("--goal", choices=["cover", "reach"], default="cover")
    v.add_argument("--target")
    v.add_argument("--bound", type=int)
    v.set_defaults(func=cmd_validate)

    b = sub.add_parser("bench", help="run coverage on every instance of a suite")
    b.add_argument("--suite", required=True)
    b.add_argument("--timeout", type=float)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--json")
    b.add_argument("--no-timing", dest="timing", action="store_false")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"uavcover: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
