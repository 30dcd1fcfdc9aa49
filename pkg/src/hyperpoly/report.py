"""Text and JSON reports, plot-data export, and constraint re-parsing."""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Sequence

from .analyzer import AbstractState, AnalysisResult
from .dtfield import INFINITE, DtScalar, PoleError, format_rational
from .errors import ParseError
from .frontend import linearize, parse_aexp_text
from .polyhedra import Constraint, GenKind, Polyhedron, Relation

# ---------------------------------------------------------------------------
# small renderers


def mode_label(names: Sequence[str], mode: tuple) -> str:
    if not names:
        return "-"
    return ",".join(f"{n}={format_rational(v)}" for n, v in zip(names, mode))


def standard_text(x: DtScalar | None) -> str:
    if x is None:
        return "unbounded"
    sp = x.standard_part()
    return "infinite" if sp is INFINITE else format_rational(sp)


def classify(c: Constraint) -> str:
    """``exact`` when no coefficient involves dt."""
    scalars = [c.expr.constant, *c.expr.coeffs.values()]
    return "exact" if all(s.is_rational() for s in scalars) else "+infinitesimal slack"


def standard_constraint(c: Constraint, dims: Sequence[str]) -> str | None:
    """The constraint with every coefficient replaced by its standard part."""
    from .polyhedra import LinearExpr

    parts = {}
    for v, x in c.expr.coeffs.items():
        sp = x.standard_part()
        if sp is INFINITE:
            return None
        parts[v] = sp
    sp = c.expr.constant.standard_part()
    if sp is INFINITE:
        return None
    return Constraint(LinearExpr(parts, sp), c.relation).render(dims)


def _numeric(x: DtScalar, dt_value: Fraction) -> str | None:
    if dt_value == 0:
        sp = x.standard_part()
        return None if sp is INFINITE else format_rational(sp)
    try:
        return format_rational(x.eval_at(dt_value))
    except PoleError:
        return None


# ---------------------------------------------------------------------------
# polyhedra as JSON


def polyhedron_json(p: Polyhedron, dt_value: Fraction = Fraction(0)) -> dict[str, Any]:
    if p.is_empty():
        return {"constraints": ["false"], "vertices": [], "rays": [], "lines": []}
    out: dict[str, Any] = {"constraints": p.render_constraints(), "vertices": [], "rays": [], "lines": []}
    for g in p.generators:
        coords = [g.coords.get(v) for v in p.dims]
        entry = {
            "symbolic": [str(c) for c in coords],
            "numeric": [_numeric(c, dt_value) for c in coords],
        }
        key = {GenKind.POINT: "vertices", GenKind.RAY: "rays", GenKind.LINE: "lines"}[g.kind]
        out[key].append(entry)
    return out


def state_json(state: AbstractState, names: Sequence[str], dt_value: Fraction = Fraction(0)) -> dict:
    return {mode_label(names, k): polyhedron_json(p, dt_value) for k, p in state.items()}


def export_plot_data(result: AnalysisResult, path: str | Path | None = None,
                     dt_value: Fraction = Fraction(0)) -> list[dict]:
    """Per-step, per-mode constraints and vertices; written to ``path`` if given."""
    steps = [state_json(t.state, result.mode_names, Fraction(dt_value)) for t in result.trace]
    if path is not None:
        Path(path).write_text(json.dumps(steps, indent=1) + "\n")
    return steps


# ---------------------------------------------------------------------------
# constraint text back to objects

_POW_RE = re.compile(r"\bdt\^(\d+)")
_REL_RE = re.compile(r"(<=|>=|=)")


def parse_constraint(text: str, dims: Sequence[str]) -> Constraint:
    """Inverse of :meth:`Constraint.render` (also accepts any affine sides)."""
    if text.strip() == "false":
        from .polyhedra import LinearExpr

        return Constraint(LinearExpr.const(-1))
    src = _POW_RE.sub(lambda m: "(" + "*".join(["dt"] * int(m.group(1))) + ")", text)
    pieces = _REL_RE.split(src)
    if len(pieces) != 3:
        raise ParseError(f"expected one relation in constraint {text!r}")
    lhs, op, rhs = pieces
    a = linearize(parse_aexp_text(lhs))
    b = linearize(parse_aexp_text(rhs))
    if a is None or b is None:
        raise ParseError(f"constraint is not affine: {text!r}")
    extra = (a.variables() | b.variables()) - set(dims)
    if extra:
        raise ParseError(f"unknown variables {sorted(extra)} in {text!r}")
    if op == ">=":
        return Constraint(a - b)
    if op == "<=":
        return Constraint(b - a)
    return Constraint(a - b, Relation.EQ)


def polyhedron_from_json(entry: Mapping[str, Any], dims: Sequence[str]) -> Polyhedron:
    return Polyhedron.from_constraints(dims, [parse_constraint(t, dims) for t in entry["constraints"]])


# ---------------------------------------------------------------------------
# analysis reports


def _ranges(state: AbstractState) -> dict[str, tuple]:
    if state.is_empty():
        return {}
    return {v: state.range_of(v) for v in state.dims}


def result_json(result: AnalysisResult, source: str | None = None) -> dict[str, Any]:
    names = result.mode_names
    w = result.widening
    loops = []
    for lid in sorted(result.loop_head_invariants):
        inv = result.loop_head_invariants[lid]
        ext = result.exit_states[lid]
        loops.append({
            "loop": lid,
            "invariant": state_json(inv, names),
            "exit": state_json(ext, names),
            "exit_empty": ext.is_empty(),
            "ranges": {
                v: {"lower": None if lo is None else str(lo), "upper": None if hi is None else str(hi),
                    "lower_standard": standard_text(lo), "upper_standard": standard_text(hi)}
                for v, (lo, hi) in _ranges(inv).items()
            },
        })
    return {
        "program": source,
        "variables": list(result.dims),
        "modes": {n: [format_rational(v) for v in vals] for n, vals in result.program.mode_vars.items()},
        "widening": {"kind": w.kind.value, "delay": w.delay,
                     "m_set": [c.render(result.dims) for c in w.m_set]},
        "iterations": result.iterations,
        "widenings_applied": result.widenings_applied,
        "lookaheads_taken": result.lookaheads_taken,
        "nonlinear_assignments": [list(p) if p else None for p in result.nonlinear_sites],
        "loops": loops,
        "final": state_json(result.final_state, names),
    }


def _state_lines(state: AbstractState, names: Sequence[str], indent: str) -> list[str]:
    if state.is_empty():
        return [f"{indent}(empty)"]
    lines = []
    for k, p in state.items():
        lines.append(f"{indent}mode {mode_label(names, k)}:")
        cs = p.constraints
        if not cs:
            lines.append(f"{indent}  (no constraints)")
        width = max((len(c.render(p.dims)) for c in cs), default=0)
        for c in cs:
            text = c.render(p.dims)
            cls = classify(c)
            if cls == "exact":
                lines.append(f"{indent}  {text.ljust(width)}   [exact]")
            else:
                sp = standard_constraint(c, p.dims)
                note = f"standard part {sp}" if sp is not None else "infinite coefficient"
                lines.append(f"{indent}  {text.ljust(width)}   [{cls}; {note}]")
    return lines


def result_text(result: AnalysisResult, source: str | None = None) -> str:
    names = result.mode_names
    w = result.widening
    out = []
    if source:
        out.append(f"program: {source}")
    m = ", ".join(c.render(result.dims) for c in w.m_set) or "none"
    out.append(f"widening: {w.kind.value}, delay {w.delay}, thresholds {{{m}}}")
    out.append(f"iterations: {result.iterations}, widenings applied: {result.widenings_applied}, "
               f"join lookaheads: {result.lookaheads_taken}, time {result.elapsed:.2f}s")
    if result.nonlinear_sites:
        sites = ", ".join(f"{p[0]}:{p[1]}" if p else "?" for p in result.nonlinear_sites)
        out.append(f"nonlinear assignments over-approximated by forgetting the target at {sites}")
    for lid in sorted(result.loop_head_invariants):
        inv = result.loop_head_invariants[lid]
        out.append(f"loop {lid} head invariant:")
        out.extend(_state_lines(inv, names, "  "))
        for v, (lo, hi) in _ranges(inv).items():
            lo_s = "-inf" if lo is None else str(lo)
            hi_s = "+inf" if hi is None else str(hi)
            out.append(f"  range {v}: [{lo_s}, {hi_s}]  standard part [{standard_text(lo)}, {standard_text(hi)}]")
        ext = result.exit_states[lid]
        if ext.is_empty():
            out.append(f"loop {lid} exit: empty (the loop never terminates)")
        else:
            out.append(f"loop {lid} exit:")
            out.extend(_state_lines(ext, names, "  "))
    out.append("final state:")
    out.extend(_state_lines(result.final_state, names, "  "))
    return "\n".join(out) + "\n"
