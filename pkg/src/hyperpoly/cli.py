"""``hyperpoly`` command line: analyze, simulate, check.

Exit status: 0 success, 1 any error (usage, I/O, parse, analysis), 2 when
``check`` finds a concrete store outside the computed invariant.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .analyzer import AnalysisConfig, analyze_program
from .dtfield import format_rational, parse_rational
from .errors import HyperpolyError
from .frontend import Program, parse_program
from .report import export_plot_data, result_json, result_text
from .simulate import check_section, simulate_section
from .widening import WideningKind

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2

log = logging.getLogger("hyperpoly")


class _Parser(argparse.ArgumentParser):
    # usage errors must not collide with the violation status
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _sweep(text: str) -> list[int]:
    return [_positive_int(t.strip()) for t in text.split(",") if t.strip()]


def _add_analysis_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--widening", choices=[k.value for k in WideningKind], default="upto-m")
    p.add_argument("--delay", type=int, default=3, help="plain joins per mode component before widening")
    p.add_argument("--modes", help='mode declaration, e.g. "p:{0,1},s:{0,1}" (overrides the pragma)')
    p.add_argument("--no-lookahead", action="store_true",
                   help="always widen once the delay has expired")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hyperpoly", description="Polyhedral analysis of While programs with an infinitesimal step dt.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="compute loop invariants")
    a.add_argument("file")
    _add_analysis_flags(a)
    a.add_argument("--dt-value", type=_rational, help="substitute dt by this positive rational first")
    a.add_argument("--output", choices=["text", "json"], default="text")
    a.add_argument("--trace", metavar="PATH", help="write per-step plot data as JSON")
    a.add_argument("--trace-dt", type=_rational, default=Fraction(0),
                   help="dt value for the numeric vertex coordinates in the trace (default 0)")

    s = sub.add_parser("simulate", help="run the dt = 1/N section concretely")
    s.add_argument("file")
    s.add_argument("--modes")
    s.add_argument("--n", type=_positive_int, required=True)
    s.add_argument("--max-steps", type=int, default=1000)
    s.add_argument("--output", choices=["text", "json"], default="text")

    c = sub.add_parser("check", help="analyze, then check simulated sections against the invariant")
    c.add_argument("file")
    _add_analysis_flags(c)
    c.add_argument("--sweep", type=_sweep, default=[100, 1000, 10000])
    c.add_argument("--max-steps", type=int, help="loop-head visits per section (default 10*N)")
    c.add_argument("--output", choices=["text", "json"], default="text")
    return ap


@dataclass(frozen=True)
class CliOptions:
    command: str
    file: str
    widening: str = "upto-m"
    delay: int = 3
    modes: str | None = None
    dt_value: Fraction | None = None
    output: str = "text"
    trace: str | None = None
    trace_dt: Fraction = Fraction(0)
    n: int | None = None
    max_steps: int | None = None
    sweep: tuple[int, ...] = (100, 1000, 10000)
    lookahead: bool = True

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "CliOptions":
        return cls(
            command=ns.command, file=ns.file,
            widening=getattr(ns, "widening", "upto-m"), delay=getattr(ns, "delay", 3),
            modes=getattr(ns, "modes", None), dt_value=getattr(ns, "dt_value", None),
            output=getattr(ns, "output", "text"), trace=getattr(ns, "trace", None),
            trace_dt=getattr(ns, "trace_dt", Fraction(0)), n=getattr(ns, "n", None),
            max_steps=getattr(ns, "max_steps", None),
            sweep=tuple(getattr(ns, "sweep", (100, 1000, 10000))),
            lookahead=not getattr(ns, "no_lookahead", False),
        )

    def analysis_config(self) -> AnalysisConfig:
        return AnalysisConfig(widening=WideningKind(self.widening), delay=self.delay,
                              modes=self.modes, dt_value=self.dt_value, lookahead=self.lookahead)


def _load(opts: CliOptions) -> Program:
    with open(opts.file, encoding="utf-8") as fh:
        src = fh.read()
    return parse_program(src, opts.modes)


def _store_text(values: dict) -> str:
    return ", ".join(f"{k}={_short(v)}" for k, v in values.items())


def _short(q: Fraction) -> str:
    s = format_rational(q)
    return s if len(s) <= 60 else f"~{float(q):.15g}"


def cmd_analyze(opts: CliOptions, out) -> int:
    prog = _load(opts)
    result = analyze_program(prog, opts.analysis_config())
    if opts.trace:
        export_plot_data(result, opts.trace, opts.trace_dt)
    if opts.output == "json":
        json.dump(result_json(result, opts.file), out, indent=1)
        out.write("\n")
    else:
        out.write(result_text(result, opts.file))
    return EXIT_OK


def cmd_simulate(opts: CliOptions, out) -> int:
    prog = _load(opts)
    steps = 1000 if opts.max_steps is None else opts.max_steps
    run = simulate_section(prog, opts.n, steps)
    if opts.output == "json":
        doc = {
            "n": opts.n,
            "truncated": run.truncated,
            "stores": [{"loop": h.loop, "step": h.step,
                        "values": {k: format_rational(v) for k, v in h.as_fractions().items()}}
                       for h in run.stores],
            "final": None if run.final is None else
            {k: format_rational(v) for k, v in run.final.as_fractions().items()},
        }
        json.dump(doc, out, indent=1)
        out.write("\n")
        return EXIT_OK
    for h in run.stores:
        out.write(f"loop {h.loop} step {h.step}: {_store_text(h.as_fractions())}\n")
    if run.final is not None:
        out.write(f"terminated: {_store_text(run.final.as_fractions())}\n")
    else:
        out.write(f"stopped after {len(run.stores)} loop-head visits\n")
    return EXIT_OK


def cmd_check(opts: CliOptions, out) -> int:
    prog = _load(opts)
    result = analyze_program(prog, opts.analysis_config())
    reports = []
    for n in opts.sweep:
        steps = 10 * n if opts.max_steps is None else opts.max_steps
        t0 = time.perf_counter()
        rep = check_section(result, prog, n, steps)
        reports.append((rep, time.perf_counter() - t0))
    bad = any(not r.ok for r, _ in reports)
    if opts.output == "json":
        json.dump({
            "program": opts.file,
            "sections": [{"n": r.n, "checked": r.checked, "violations": len(r.violations),
                          "truncated": r.truncated,
                          "examples": [v.describe() for v in r.violations[:5]]} for r, _ in reports],
            "ok": not bad,
        }, out, indent=1)
        out.write("\n")
    else:
        for r, dt in reports:
            status = "ok" if r.ok else "VIOLATED"
            out.write(f"dt = 1/{r.n}: {r.checked} loop-head stores, {len(r.violations)} violations "
                      f"[{status}] ({dt:.1f}s)\n")
            for v in r.violations[:5]:
                out.write(f"  {v.describe()}\n")
    return EXIT_VIOLATION if bad else EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "simulate": cmd_simulate, "check": cmd_check}


def run(opts: CliOptions, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        return COMMANDS[opts.command](opts, out)
    except OSError as exc:
        err.write(f"hyperpoly: {exc}\n")
    except HyperpolyError as exc:
        err.write(f"hyperpoly: {opts.file}:{exc}\n" if exc.pos else f"hyperpoly: {opts.file}: {exc}\n")
    except (ValueError, ZeroDivisionError) as exc:
        err.write(f"hyperpoly: {exc}\n")
    return EXIT_ERROR


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    return run(CliOptions.from_namespace(ns))


if __name__ == "__main__":
    sys.exit(main())
