from __future__ import annotations

import time
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperpoly.analyzer import (
    NONLINEAR, AbstractState, Affine, AnalysisConfig, analyze_program, analyze_while, eval_affine,
    is_post_fixpoint, transfer,
)
from hyperpoly.dtfield import DT, DtScalar
from hyperpoly.errors import AnalysisError
from hyperpoly.frontend import (
    Assign, BinOp, If, Lit, Lt, Not, Seq, Skip, Var, normalize, parse_aexp_text, parse_program,
)
from hyperpoly.polyhedra import LinearExpr, Polyhedron
from hyperpoly.widening import WideningKind

from conftest import bench_source
from strategies import polyhedra

x, t, l = LinearExpr.var("x"), LinearExpr.var("t"), LinearExpr.var("l")
ONE, ZERO = Fraction(1), Fraction(0)
EXAMPLE_ONE = "t := 0; while t <= 1 do t := t + dt"


def P(dims, *cs):
    return Polyhedron.from_constraints(dims, cs)


def x_range(result):
    return result.invariant.range_of("x")


# -- eval_affine ------------------------------------------------------------------

def test_eval_affine_examples():
    got = eval_affine(parse_aexp_text("x + dt"))
    assert isinstance(got, Affine) and got.expr.same_as(x + DT)
    got = eval_affine(parse_aexp_text("x + 3*(30 - x)*dt"), {"p": ONE})
    # symbolic expansion: x + 90 dt - 3 dt x
    assert got.expr.same_as(LinearExpr({"x": 1 - 3 * DT}, 90 * DT))
    assert eval_affine(parse_aexp_text("x*y")) is NONLINEAR
    got = eval_affine(parse_aexp_text("p * x + (1 - p) * 2"), {"p": ZERO})
    assert got.expr.same_as(LinearExpr({}, 2))
    assert eval_affine(parse_aexp_text("x / dt")).expr.same_as(LinearExpr({"x": 1 / DT}))
    with pytest.raises(AnalysisError):
        eval_affine(parse_aexp_text("x / (p - 1)"), {"p": ONE})


# -- transfer ---------------------------------------------------------------------

def test_transfer_mode_conditional():
    prog = parse_program("(*@ modes p:{0,1} *) p := 1; x := 1; if p = 1 then x := x + dt else x := x - 2*dt")
    state = AbstractState(("x",), {(ONE,): P(("x",), x.equals(1))})
    cmd = normalize(prog).body.second.second
    out = transfer(state, cmd, prog)
    assert out == AbstractState(("x",), {(ONE,): P(("x",), x.equals(1 + DT))})


def test_transfer_mode_relocation():
    prog = parse_program("(*@ modes p:{0,1}, s:{0,1} *) x := 1; p := 1 - p")
    body = prog.body.second
    poly = P(("x",), x >= 0, x <= 10)
    out = transfer(AbstractState(("x",), {(ONE, ZERO): poly}), body, prog)
    assert out == AbstractState(("x",), {(ZERO, ZERO): poly})
    # two components landing on the same valuation are joined
    both = AbstractState(("x",), {(ONE, ZERO): P(("x",), x.equals(1)), (ZERO, ZERO): P(("x",), x.equals(3))})
    assert transfer(both, body, prog) == AbstractState(
        ("x",), {(ZERO, ZERO): P(("x",), x.equals(1)), (ONE, ZERO): P(("x",), x.equals(3))})


def test_transfer_skip_and_mode_errors():
    src = "(*@ modes p:{0,1} *) x := 0; p := p + 1"
    prog = parse_program(src)
    state = AbstractState(("x",), {(ONE,): P(("x",), x.equals(0))})
    assert transfer(state, Skip(), prog) == state
    with pytest.raises(AnalysisError, match="mode update not finite") as exc:
        transfer(state, prog.body.second, prog)
    assert exc.value.pos == (1, src.index("p :=") + 1)
    prog = parse_program("(*@ modes p:{0,1} *) x := 0; p := x")
    with pytest.raises(AnalysisError, match="mode update not finite"):
        transfer(state, prog.body.second, prog)


def test_nonlinear_assignment_forgets_target():
    prog = parse_program("x := 2; y := 3; x := x * y")
    res = analyze_program(prog)
    y = LinearExpr.var("y")
    assert res.final_state == AbstractState(("x", "y"), {(): P(("x", "y"), y.equals(3))})
    assert res.nonlinear_sites == [(1, 17)]


def test_guards_use_closed_relaxation():
    prog = parse_program("x := 0; if x < 0 then y := 1 else y := 2")
    res = analyze_program(prog)
    # x = 0 satisfies the closure of x < 0, so both branches are reachable
    assert res.final_state.range_of("y") == (1, 2)
    # a constant comparison is decided exactly
    res = analyze_program(parse_program("x := 0; if 1 < 1 then y := 1 else y := 2"))
    assert res.final_state.range_of("y") == (2, 2)


def test_disjunctive_guard_joins_branches():
    prog = parse_program("x := 0; while x <= 10 do if (x < 3 || 7 < x) then x := x + 1 else x := x + 2")
    res = analyze_program(prog)
    # x + 2 only runs on 3 <= x <= 7, so the last step out is x + 1 from 10
    assert res.exit_states[0].range_of("x") == (10, 11)


# -- loops ------------------------------------------------------------------------

def test_example_one():
    prog = parse_program(EXAMPLE_ONE)
    for delay in (1, 3):
        res = analyze_program(prog, AnalysisConfig(delay=delay))
        assert res.invariant == AbstractState(("t",), {(): P(("t",), t >= 0, t <= 1 + DT)})
        assert res.exit_states[0] == AbstractState(("t",), {(): P(("t",), t >= 1, t <= 1 + DT)})
        assert res.final_state == res.exit_states[0]


def test_analyze_while_direct():
    prog = normalize(parse_program(EXAMPLE_ONE))
    loop = prog.body.second
    start = AbstractState(("t",), {(): P(("t",), t.equals(0))})
    inv, exit_state, trace = analyze_while(start, loop.cond, loop.body, prog,
                                           AnalysisConfig(delay=1, m_set=(t <= 1, t >= 1)))
    assert inv == AbstractState(("t",), {(): P(("t",), t >= 0, t <= 1 + DT)})
    assert exit_state.range_of("t") == (1, 1 + DT)
    assert trace[0].state == start


def test_stationary_body():
    res = analyze_program(parse_program("x := 0; while x < 1 do skip"))
    assert res.invariant == AbstractState(("x",), {(): P(("x",), x.equals(0))})
    assert res.iterations == 1 and len(res.trace) == 1


def test_skip_program():
    res = analyze_program(parse_program("skip"))
    assert res.final_state == AbstractState((), {(): Polyhedron.universe(())})
    assert res.loop_head_invariants == {}


def test_standard_widening_loses_the_bound():
    res = analyze_program(parse_program(EXAMPLE_ONE), AnalysisConfig(widening=WideningKind.STANDARD, delay=0,
                                                                     lookahead=False))
    assert res.invariant.range_of("t") == (0, None)
    assert res.exit_states[0].range_of("t") == (1, None)


def test_nested_loops_have_own_invariants():
    src = "i := 0; while i <= 2 do { j := 0; while j <= 1 do j := j + dt; i := i + 1 }"
    res = analyze_program(parse_program(src))
    assert sorted(res.loop_head_invariants) == [0, 1]
    assert res.exit_states[0].range_of("i") == (2, 3)
    assert res.loop_head_invariants[1].range_of("j") == (0, 1 + DT)
    assert is_post_fixpoint(res, 0) and is_post_fixpoint(res, 1)


def test_max_iterations_safety_net():
    with pytest.raises(AnalysisError, match="failed to stabilize"):
        analyze_program(parse_program("x := 0; while true do x := x + 1"),
                        AnalysisConfig(delay=100, max_iterations=5, lookahead=False))


def test_config_validation():
    with pytest.raises(ValueError):
        AnalysisConfig(delay=-1)
    with pytest.raises(ValueError):
        AnalysisConfig(dt_value=0)


# -- benchmarks -------------------------------------------------------------------

def test_water_level(water_level_result):
    res = water_level_result
    assert x_range(res) == (1 - 2 * DT, 12 + DT)
    assert res.exit_states[0].is_empty()
    dims = res.dims
    assert res.initial_state[(ONE, ZERO)] == P(dims, x.equals(1), l.equals(0))
    assert res.initial_state.modes() == [(ONE, ZERO)]
    assert set(res.invariant.modes()) == {(ONE, ZERO), (ONE, ONE), (ZERO, ZERO), (ZERO, ONE)}


def test_water_level_numeric(water_level):
    res = analyze_program(water_level, AnalysisConfig(dt_value=Fraction(1, 5)))
    assert x_range(res) == (Fraction(3, 5), Fraction(61, 5))
    discrete = parse_program(bench_source("water_level_discrete.wdt"))
    assert x_range(analyze_program(discrete)) == (Fraction(3, 5), Fraction(61, 5))


def test_thermostat(thermostat_result):
    assert x_range(thermostat_result) == (18 - 54 * DT, 22 + 24 * DT)
    assert thermostat_result.exit_states[0].is_empty()


def test_post_fixpoint_certificates(water_level_result, thermostat_result):
    for res in (water_level_result, thermostat_result):
        assert is_post_fixpoint(res)
        assert res.invariant.includes(res.initial_state)


def test_traces_ascend(water_level_result, thermostat_result):
    for res in (water_level_result, thermostat_result):
        states = [s.state for s in res.trace if s.loop == 0]
        assert states[-1] == res.invariant
        for a, b in zip(states, states[1:]):
            assert b.includes(a)


def test_analysis_is_deterministic(thermostat):
    a = analyze_program(thermostat)
    b = analyze_program(thermostat)
    assert a.invariant == b.invariant
    assert [s.state for s in a.trace] == [s.state for s in b.trace]


def test_without_lookahead_still_sound(thermostat):
    res = analyze_program(thermostat, AnalysisConfig(lookahead=False))
    lo, hi = x_range(res)
    assert is_post_fixpoint(res)
    # coarser than the default result, never finer
    assert res.invariant.includes(analyze_program(thermostat).invariant)
    assert lo is None or lo <= 18 - 54 * DT


# -- monotonicity -------------------------------------------------------------------

XY = ("x", "y")
small = st.integers(-3, 3).map(lambda v: Lit(Fraction(v)))
terms = st.one_of(small, st.sampled_from(XY).map(Var))
aff = st.one_of(terms, st.builds(BinOp, st.sampled_from("+-"), terms, terms),
                st.builds(BinOp, st.just("*"), small, terms),
                st.builds(BinOp, st.just("*"), terms, terms))
conds = st.one_of(st.builds(Lt, aff, aff), st.builds(lambda a, b: Not(Lt(a, b)), aff, aff))


def loop_free(depth=2):
    leaf = st.one_of(st.just(Skip()), st.builds(Assign, st.sampled_from(XY), aff),
                     st.builds(lambda v, a: Assign(v, BinOp("+", Var(v), a)), st.sampled_from(XY),
                               st.just(Lit(Fraction(0))) | st.builds(lambda k: BinOp("*", Lit(Fraction(k)), DT_LIT), st.integers(-2, 2))))
    if depth == 0:
        return leaf
    sub = loop_free(depth - 1)
    return st.one_of(leaf, st.builds(Seq, sub, sub), st.builds(If, conds, sub, sub))


DT_LIT = parse_aexp_text("dt")
PROG = parse_program("x := 0; y := 0")


@settings(max_examples=300)
@given(polyhedra(dims=XY, max_constraints=3), polyhedra(dims=XY, max_constraints=2), loop_free())
def test_transfer_is_monotone(p, extra, cmd):
    small_state = AbstractState(XY, {(): p})
    big_state = AbstractState(XY, {(): p.join(extra)})
    lo, hi = transfer(small_state, cmd, PROG), transfer(big_state, cmd, PROG)
    assert hi.includes(lo)


def test_dt_scalars_in_results_are_exact(thermostat_result):
    lo, hi = x_range(thermostat_result)
    assert isinstance(lo, DtScalar) and lo.standard_part() == 18 and hi.standard_part() == 22


def test_water_level_runtime(water_level):
    t0 = time.perf_counter()
    analyze_program(water_level)
    assert time.perf_counter() - t0 < 60
