"""Abstract transfer functions and the widening-accelerated fixpoint engine.

The abstract state keeps one polyhedron over the numeric variables per
valuation of the declared mode variables.  Mode variables are evaluated
exactly, so tests on them split the state precisely; numeric tests are
met as closed half-spaces.
"""

from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .dtfield import DtScalar
from .errors import AnalysisError
from .frontend import (
    AExp, And, Assign, BExp, BoolLit, Cmd, If, Lt, Not, Or, Program, Seq, Skip,
    While, collect_m_set, linearize, nnf, normalize, substitute_dt, while_loops,
    with_modes,
)
from .polyhedra import Constraint, LinearExpr, Polyhedron
from .widening import WideningConfig, WideningKind, widen_step

log = logging.getLogger(__name__)

Mode = tuple  # tuple of Fractions in declaration order


# ---------------------------------------------------------------------------
# affine classification


@dataclass(frozen=True)
class Affine:
    expr: LinearExpr


class _Nonlinear:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "NONLINEAR"


NONLINEAR = _Nonlinear()


def eval_affine(a: AExp, mode: Mapping[str, Fraction] | None = None) -> Affine | _Nonlinear:
    """Fold mode values and constants; Affine when degree <= 1 in the rest."""
    e = linearize(a, mode or {})
    return NONLINEAR if e is None else Affine(e)


# ---------------------------------------------------------------------------
# abstract state


class AbstractState:
    """Mode valuation -> nonempty polyhedron; missing keys mean empty."""

    __slots__ = ("dims", "parts")

    def __init__(self, dims: Sequence[str], parts: Mapping[Mode, Polyhedron] | None = None):
        self.dims = tuple(dims)
        self.parts: dict[Mode, Polyhedron] = {
            k: p for k, p in (parts or {}).items() if not p.is_empty()
        }

    @classmethod
    def bottom(cls, dims: Sequence[str]) -> "AbstractState":
        return cls(dims)

    def is_empty(self) -> bool:
        return not self.parts

    def modes(self) -> list[Mode]:
        return sorted(self.parts)

    def items(self) -> Iterator[tuple[Mode, Polyhedron]]:
        for k in sorted(self.parts):
            yield k, self.parts[k]

    def __getitem__(self, k: Mode) -> Polyhedron:
        return self.parts.get(k) or Polyhedron.empty(self.dims)

    def __contains__(self, k: Mode) -> bool:
        return k in self.parts

    def __len__(self) -> int:
        return len(self.parts)

    def join(self, other: "AbstractState") -> "AbstractState":
        out = dict(self.parts)
        for k, p in other.parts.items():
            out[k] = out[k].join(p) if k in out else p
        return AbstractState(self.dims, out)

    def includes(self, other: "AbstractState") -> bool:
        """``other`` is componentwise below ``self``."""
        return all(k in self.parts and self.parts[k].includes(p) for k, p in other.parts.items())

    def __le__(self, other: "AbstractState") -> bool:
        return other.includes(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AbstractState):
            return NotImplemented
        return self.includes(other) and other.includes(self)

    __hash__ = None

    def add(self, k: Mode, p: Polyhedron) -> None:
        # in-place accumulation; only used while building a fresh state
        if p.is_empty():
            return
        self.parts[k] = self.parts[k].join(p) if k in self.parts else p

    def range_of(self, var: str) -> tuple[DtScalar | None, DtScalar | None] | None:
        """Bounds of ``var`` over the union of components (None if empty)."""
        if not self.parts:
            return None
        los, his = [], []
        for p in self.parts.values():
            lo, hi = p.bounds(var)
            los.append(lo)
            his.append(hi)
        lo = None if any(v is None for v in los) else min(los)
        hi = None if any(v is None for v in his) else max(his)
        return lo, hi

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {p.render_constraints()}" for k, p in self.items())
        return f"AbstractState({{{body}}})"


# ---------------------------------------------------------------------------
# configuration and results


@dataclass(frozen=True)
class AnalysisConfig:
    widening: WideningKind = WideningKind.UPTO_M
    delay: int = 3
    m_set: tuple[Constraint, ...] | None = None  # None: collect from the program
    modes: str | None = None  # overrides the source pragma
    dt_value: Fraction | None = None
    max_iterations: int = 10000
    lookahead: bool = True
    record_trace: bool = True

    def __post_init__(self):
        if self.delay < 0:
            raise ValueError("delay must be nonnegative")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.dt_value is not None:
            object.__setattr__(self, "dt_value", Fraction(self.dt_value))
            if self.dt_value <= 0:
                raise ValueError("dt must be substituted by a positive value")


@dataclass(frozen=True)
class TraceStep:
    loop: int
    iteration: int
    state: AbstractState


@dataclass
class AnalysisResult:
    program: Program
    initial_state: AbstractState | None
    loop_head_invariants: dict[int, AbstractState]
    exit_states: dict[int, AbstractState]
    final_state: AbstractState
    trace: list[TraceStep]
    iterations: int
    widenings_applied: int
    lookaheads_taken: int
    nonlinear_sites: list[tuple[int, int] | None]
    widening: WideningConfig
    elapsed: float = 0.0

    @property
    def invariant(self) -> AbstractState:
        """Head invariant of the first (outermost) loop, else the final state."""
        if 0 in self.loop_head_invariants:
            return self.loop_head_invariants[0]
        return self.final_state

    @property
    def dims(self) -> tuple[str, ...]:
        return self.program.numeric_vars

    @property
    def mode_names(self) -> tuple[str, ...]:
        return self.program.mode_names


# ---------------------------------------------------------------------------
# transfer functions


def _guard_poly(p: Polyhedron, b: BExp, env: Mapping[str, Fraction]) -> Polyhedron:
    """Meet with a condition in negation normal form (closed relaxation)."""
    if p.is_empty():
        return p
    if isinstance(b, BoolLit):
        return p if b.value else Polyhedron.empty(p.dims)
    if isinstance(b, And):
        return _guard_poly(_guard_poly(p, b.left, env), b.right, env)
    if isinstance(b, Or):
        return _guard_poly(p, b.left, env).join(_guard_poly(p, b.right, env))
    if isinstance(b, Lt):
        diff = _difference(b.right, b.left, env)  # a < b  <=>  b - a > 0
        strict = True
    elif isinstance(b, Not) and isinstance(b.arg, Lt):
        diff = _difference(b.arg.left, b.arg.right, env)  # !(a < b)  <=>  a - b >= 0
        strict = False
    else:
        raise AnalysisError(f"condition not in normal form: {b!r}")
    if diff is None:
        return p  # nonlinear test: no filtering
    if diff.is_constant():
        s = diff.constant.sign()
        holds = s > 0 if strict else s >= 0
        return p if holds else Polyhedron.empty(p.dims)
    return p.add_constraints([Constraint(diff)])


def _difference(a: AExp, b: AExp, env: Mapping[str, Fraction]) -> LinearExpr | None:
    la = linearize(a, env)
    lb = linearize(b, env)
    if la is None or lb is None:
        return None
    return la - lb


class _Context:
    """Per-run bookkeeping shared by transfer and the loop engine."""

    def __init__(self, program: Program, cfg: AnalysisConfig, widening: WideningConfig):
        self.program = program
        self.cfg = cfg
        self.widening = widening
        self.dims = program.numeric_vars
        self.mode_names = program.mode_names
        # keyed by identity; the list keeps the nodes alive so ids stay unique
        self.loops = list(while_loops(program.body))
        self.loop_ids = {id(w): i for i, w in enumerate(self.loops)}
        self.trace: list[TraceStep] = []
        self.invariants: dict[int, AbstractState] = {}
        self.exits: dict[int, AbstractState] = {}
        self.iterations = 0
        self.widenings = 0
        self.lookaheads = 0
        self.nonlinear: list = []

    def env(self, mode: Mode) -> dict[str, Fraction]:
        return dict(zip(self.mode_names, mode))

    def loop_id(self, w: While) -> int:
        # loops analysed outside the program body get the next free number
        if id(w) not in self.loop_ids:
            self.loops.append(w)
            self.loop_ids[id(w)] = len(self.loops) - 1
        return self.loop_ids[id(w)]


def meet_guard(state: AbstractState, b: BExp, mode_names: Sequence[str]) -> AbstractState:
    """Restrict every component to the stores (closed-)satisfying ``b``."""
    b = nnf(b)
    out = {}
    for k, p in state.parts.items():
        q = _guard_poly(p, b, dict(zip(mode_names, k)))
        if not q.is_empty():
            out[k] = q
    return AbstractState(state.dims, out)


def _assign(state: AbstractState, c: Assign, ctx: _Context) -> AbstractState:
    out = AbstractState(state.dims)
    if c.var in ctx.program.mode_vars:
        idx = ctx.mode_names.index(c.var)
        allowed = ctx.program.mode_vars[c.var]
        for k, p in state.parts.items():
            e = linearize(c.expr, ctx.env(k))
            if e is None or not e.is_constant() or not e.constant.is_rational():
                raise AnalysisError("mode update not finite", c.pos)
            v = e.constant.to_rational()
            if v not in allowed:
                raise AnalysisError(f"mode update not finite: {c.var} := {v} is not a declared value", c.pos)
            out.add(k[:idx] + (v,) + k[idx + 1:], p)
        return out
    for k, p in state.parts.items():
        e = linearize(c.expr, ctx.env(k))
        if e is None:
            if c.pos not in ctx.nonlinear:
                ctx.nonlinear.append(c.pos)
            out.add(k, p.forget(c.var))
        else:
            out.add(k, p.affine_image(c.var, e))
    return out


def _transfer(state: AbstractState, c: Cmd, ctx: _Context) -> AbstractState:
    if state.is_empty() or isinstance(c, Skip):
        return state
    if isinstance(c, Assign):
        return _assign(state, c, ctx)
    if isinstance(c, Seq):
        return _transfer(_transfer(state, c.first, ctx), c.second, ctx)
    if isinstance(c, If):
        cond = nnf(c.cond)
        then = _transfer(meet_guard(state, cond, ctx.mode_names), c.then, ctx)
        orelse = _transfer(meet_guard(state, nnf(cond, False), ctx.mode_names), c.orelse, ctx)
        return then.join(orelse)
    if isinstance(c, While):
        _, exit_state = _analyze_while(state, c, ctx)
        return exit_state
    raise TypeError(f"not a command: {c!r}")


def transfer(state: AbstractState, c: Cmd, program: Program,
             cfg: AnalysisConfig | None = None) -> AbstractState:
    """Abstract post-image of ``c``; nested loops are analysed to their exit."""
    cfg = cfg or AnalysisConfig()
    ctx = _Context(program, cfg, _widening_config(program, cfg))
    return _transfer(state, c, ctx)


def _analyze_while(state0: AbstractState, w: While, ctx: _Context) -> tuple[AbstractState, AbstractState]:
    cfg, wcfg = ctx.cfg, ctx.widening
    lid = ctx.loop_id(w)
    cond = nnf(w.cond)
    names = ctx.mode_names

    def F(x: AbstractState) -> AbstractState:
        return state0.join(_transfer(meet_guard(x, cond, names), w.body, ctx))

    x = state0
    counters: dict[Mode, int] = {}
    step = 0
    if cfg.record_trace:
        ctx.trace.append(TraceStep(lid, step, x))
    fx = F(x)
    while True:
        ctx.iterations += 1
        if step >= cfg.max_iterations:
            raise AnalysisError("widening failed to stabilize")
        if x.includes(fx):
            break
        joined = x.join(fx)
        grown = [k for k in joined.parts if k in x.parts and not x.parts[k].includes(joined.parts[k])]
        widening_due = any(counters.get(k, 0) >= wcfg.delay for k in grown)
        nxt = None
        if widening_due and cfg.lookahead:
            # the plain join may already be a post-fixpoint; prefer it to widening
            fj = F(joined)
            if joined.includes(fj):
                ctx.lookaheads += 1
                nxt, fnext = joined, fj
        if nxt is None:
            parts = {}
            for k, pj in joined.parts.items():
                if k not in x.parts:
                    parts[k] = pj
                    counters[k] = 0
                elif k in grown:
                    n = counters.get(k, 0)
                    if n >= wcfg.delay:
                        ctx.widenings += 1
                    parts[k] = widen_step(wcfg, n, x.parts[k], pj)
                    counters[k] = n + 1
                else:
                    parts[k] = x.parts[k]
            nxt = AbstractState(x.dims, parts)
            fnext = F(nxt)
        x = nxt
        step += 1
        if cfg.record_trace:
            ctx.trace.append(TraceStep(lid, step, x))
        fx = fnext
    exit_state = meet_guard(x, nnf(cond, False), names)
    ctx.invariants[lid] = x
    ctx.exits[lid] = exit_state
    return x, exit_state


def analyze_while(state0: AbstractState, b: BExp, body: Cmd, program: Program,
                  cfg: AnalysisConfig | None = None) -> tuple[AbstractState, AbstractState, list[TraceStep]]:
    """Loop-head invariant, exit state and iteration trace of ``while b do body``."""
    cfg = cfg or AnalysisConfig()
    ctx = _Context(program, cfg, _widening_config(program, cfg))
    inv, exit_state = _analyze_while(state0, While(nnf(b), body), ctx)
    return inv, exit_state, ctx.trace


def post_image(state: AbstractState, w: While, program: Program,
               cfg: AnalysisConfig | None = None) -> AbstractState:
    """One application of the loop functional without the entry join."""
    cfg = cfg or AnalysisConfig()
    ctx = _Context(program, cfg, _widening_config(program, cfg))
    return _transfer(meet_guard(state, nnf(w.cond), program.mode_names), w.body, ctx)


# ---------------------------------------------------------------------------
# whole programs


def _widening_config(program: Program, cfg: AnalysisConfig) -> WideningConfig:
    if cfg.widening is WideningKind.STANDARD:
        m: tuple = ()
    elif cfg.m_set is not None:
        m = tuple(cfg.m_set)
    else:
        m = tuple(collect_m_set(program))
    return WideningConfig(kind=cfg.widening, m_set=m, delay=cfg.delay)


def initial_state(program: Program) -> AbstractState:
    """Universe in every mode valuation."""
    dims = program.numeric_vars
    top = Polyhedron.universe(dims)
    modes = itertools.product(*program.mode_vars.values())
    return AbstractState(dims, {m: top for m in modes})


def prepare(program: Program, cfg: AnalysisConfig) -> Program:
    p = normalize(program)
    if cfg.modes:
        p = with_modes(p, cfg.modes)
    if cfg.dt_value is not None:
        p = substitute_dt(p, cfg.dt_value)
    return p


def analyze_program(program: Program, cfg: AnalysisConfig | None = None) -> AnalysisResult:
    cfg = cfg or AnalysisConfig()
    start = time.perf_counter()
    p = prepare(program, cfg)
    ctx = _Context(p, cfg, _widening_config(p, cfg))
    init = initial_state(p)
    final = _transfer(init, p.body, ctx)
    first_state = ctx.trace[0].state if ctx.trace else None
    return AnalysisResult(
        program=p,
        initial_state=first_state,
        loop_head_invariants=dict(ctx.invariants),
        exit_states=dict(ctx.exits),
        final_state=final,
        trace=ctx.trace,
        iterations=ctx.iterations,
        widenings_applied=ctx.widenings,
        lookaheads_taken=ctx.lookaheads,
        nonlinear_sites=ctx.nonlinear,
        widening=ctx.widening,
        elapsed=time.perf_counter() - start,
    )


def is_post_fixpoint(result: AnalysisResult, loop: int = 0) -> bool:
    """Re-check F(X) below X for the recorded invariant of a loop."""
    loops = while_loops(result.program.body)
    w = loops[loop]
    inv = result.loop_head_invariants[loop]
    post = post_image(inv, w, result.program)
    return inv.includes(post)
