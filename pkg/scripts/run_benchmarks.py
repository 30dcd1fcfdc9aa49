"""Analyze every bundled benchmark and print the variable ranges at the loop head.

    python3 scripts/run_benchmarks.py [--widening standard] [--delay 3] [--dt-value 1/5]
"""

from __future__ import annotations

import argparse
from importlib import resources

from hyperpoly.analyzer import AnalysisConfig, analyze_program
from hyperpoly.dtfield import parse_rational
from hyperpoly.frontend import parse_program
from hyperpoly.report import standard_text
from hyperpoly.widening import WideningKind


def bound_text(b) -> str:
    return "-inf/+inf" if b is None else str(b)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--widening", choices=[k.value for k in WideningKind], default="upto-m")
    ap.add_argument("--delay", type=int, default=3)
    ap.add_argument("--dt-value", type=parse_rational)
    args = ap.parse_args()
    cfg = AnalysisConfig(widening=WideningKind(args.widening), delay=args.delay, dt_value=args.dt_value)

    bench = resources.files("hyperpoly.benchmarks")
    for entry in sorted(bench.iterdir(), key=lambda p: p.name):
        if not entry.name.endswith(".wdt"):
            continue
        prog = parse_program(entry.read_text())
        res = analyze_program(prog, cfg)
        print(f"{entry.name}: {res.iterations} iterations, {res.widenings_applied} widenings, "
              f"{res.elapsed:.2f}s")
        inv = res.invariant
        for var in res.dims:
            rng = inv.range_of(var)
            if rng is None:
                print(f"  {var}: empty")
                continue
            lo, hi = rng
            print(f"  {var}: [{bound_text(lo)}, {bound_text(hi)}]"
                  f"  standard part [{standard_text(lo)}, {standard_text(hi)}]")


if __name__ == "__main__":
    main()
