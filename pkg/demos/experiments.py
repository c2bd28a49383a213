"""Regenerate the four random families and print yes / no / timeout tables.

Defaults are small (|V| = 5 and 10, 20 instances each, 60 s timeout); the
acceptance run uses 100 instances and 300 s.  Absolute counts depend on the
declared edge densities, so compare trends rather than numbers.
"""
import argparse
import tempfile

from uavcover.cli import format_table, run_bench
from uavcover.generate import FAMILIES, experiment_suite, write_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[5, 10])
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--timeout", type=float, default=60.0)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as d:
        items = [it for fam in FAMILIES for it in experiment_suite(fam, args.sizes, args.count, args.seed)]
        write_suite(d, items, vars(args))
        report = run_bench(d, args.timeout, jobs=args.jobs)
    print(format_table(report), end="")
    bad = sum(r["invalid_plans"] for r in report["rows"])
    print(f"\n{len(items)} instances, {bad} invalid plans")


if __name__ == "__main__":
    main()
