"""Print the range of one variable at every fixpoint step as CSV.

Bounds are evaluated at a concrete dt (default 1/100) so the output can be
plotted directly, e.g. ``python3 scripts/trace_ranges.py water_level.wdt x > x.csv``.
"""

from __future__ import annotations

import argparse
import csv
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from hyperpoly.analyzer import analyze_program
from hyperpoly.dtfield import parse_rational
from hyperpoly.frontend import parse_program
from hyperpoly.report import mode_label


def load(name: str) -> str:
    path = Path(name)
    if path.exists():
        return path.read_text()
    return resources.files("hyperpoly.benchmarks").joinpath(name).read_text()


def at(bound, dt: Fraction) -> str:
    return "" if bound is None else str(float(bound.eval_at(dt)))


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("program", help="path or bundled benchmark name")
    ap.add_argument("var")
    ap.add_argument("--dt", type=parse_rational, default=Fraction(1, 100))
    args = ap.parse_args()

    res = analyze_program(parse_program(load(args.program)))
    if args.var not in res.dims:
        sys.exit(f"unknown variable {args.var!r}; numeric variables are {', '.join(res.dims)}")
    out = csv.writer(sys.stdout)
    out.writerow(["loop", "iteration", "mode", "lower", "upper"])
    for step in res.trace:
        for mode, poly in step.state.items():
            lo, hi = poly.bounds(args.var)
            out.writerow([step.loop, step.iteration, mode_label(res.mode_names, mode),
                          at(lo, args.dt), at(hi, args.dt)])


if __name__ == "__main__":
    main()
