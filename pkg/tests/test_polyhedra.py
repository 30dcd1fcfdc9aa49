from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hyperpoly.dtfield import DT, DtScalar, PoleError
from hyperpoly.polyhedra import (
    Constraint, GenKind, Generator, LinearExpr, Polyhedron,
    constraints_to_generators, generators_to_constraints,
)

import oracles
from strategies import DIMS, constraints, linear_dt, polyhedra, small_ints

CASES = settings(max_examples=1000)

x, y = LinearExpr.var("x"), LinearExpr.var("y")
X = ("x",)
XY = ("x", "y")


def P(dims, *cs):
    return Polyhedron.from_constraints(dims, cs)


def point_set(gens, kind):
    return {tuple(g.coords[v] for v in sorted(g.coords)) for g in gens if g.kind is kind}


# -- conversions --------------------------------------------------------------

def test_segment_vertices_match_oracle():
    gens = constraints_to_generators([x >= 0, x <= 1], X)
    got = {g.coords["x"] for g in gens if g.kind is GenKind.POINT}
    assert got == {Fraction(v[0]) for v in oracles.vertices([[0, 1], [1, -1]], 1)}
    assert all(g.kind is GenKind.POINT for g in gens)


def test_half_line_and_universe():
    gens = constraints_to_generators([x >= 0], X)
    assert {(g.kind, g.coords["x"]) for g in gens} == {(GenKind.POINT, 0), (GenKind.RAY, 1)}
    gens = constraints_to_generators([], X)
    kinds = sorted(g.kind.value for g in gens)
    assert kinds == ["line", "point"]
    assert [g.coords["x"] for g in gens if g.kind is GenKind.POINT] == [0]


def test_hull_of_two_points_with_dt():
    cs = generators_to_constraints([Generator.point(x=0), Generator.point(x=1 + DT)], X)
    q = Polyhedron.from_constraints(X, cs)
    assert q == P(X, x >= 0, x <= 1 + DT)
    for v in (0, 1 + DT, (1 + DT) / 2):
        assert q.contains_point({"x": v})
    assert not q.contains_point({"x": 1 + 2 * DT})


def test_ray_generator_and_empty_generators():
    cs = generators_to_constraints([Generator.point(x=0), Generator.ray(x=1)], X)
    assert [c.render(X) for c in cs] == ["x >= 0"]
    assert Polyhedron.from_generators(X, []).is_empty()


# -- lattice ------------------------------------------------------------------

def test_meet_examples():
    assert P(X, x >= 0).meet(P(X, x <= 1 - 2 * DT)) == P(X, x >= 0, x <= 1 - 2 * DT)
    p = P(XY, x >= 0, y <= x)
    assert p.meet(Polyhedron.universe(XY)) == p
    assert P(X, x >= 1).meet(P(X, x <= 1 - DT)).is_empty()


def test_join_examples():
    assert P(X, x.equals(0)).join(P(X, x.equals(1 + DT))) == P(X, x >= 0, x <= 1 + DT)
    p = P(XY, x >= 0, y >= x)
    assert p.join(Polyhedron.empty(XY)) == p
    tri = P(XY, x >= 0, x <= 1, y.equals(0)).join(P(XY, x.equals(0), y >= 0, y <= 1))
    pts = {(g.coords["x"], g.coords["y"]) for g in tri.generators if g.kind is GenKind.POINT}
    assert pts == oracles.extreme_points([(0, 0), (1, 0), (0, 0), (0, 1)])


def test_includes_examples():
    assert P(X, x >= 0, x <= 1 + DT).includes(P(X, x >= 0, x <= 1))
    assert not P(X, x >= 0, x <= 1).includes(P(X, x >= 0, x <= 1 + DT))
    assert P(X, x >= 0).includes(Polyhedron.empty(X))


def test_is_empty_examples():
    assert P(X, x >= 1, x <= 0).is_empty()
    assert not Polyhedron.universe(X).is_empty()
    assert not P(X, x >= 1, x <= 1 + DT).is_empty()


def test_zero_dimensional():
    u = Polyhedron.universe(())
    assert not u.is_empty() and u.is_universe()
    e = Polyhedron.from_constraints((), [Constraint(LinearExpr.const(-1))])
    assert e.is_empty()


# -- transformers ------------------------------------------------------------

def test_affine_image_examples():
    assert P(X, x.equals(1)).affine_image("x", x + DT) == P(X, x.equals(1 + DT))
    assert P(X, x >= 0, x <= 1).affine_image("x", x - 2 * DT) == P(X, x >= -2 * DT, x <= 1 - 2 * DT)
    img = P(X, x >= 18, x <= 22).affine_image("x", (1 - 3 * DT) * x)
    assert img == P(X, x >= 18 * (1 - 3 * DT), x <= 22 * (1 - 3 * DT))


def test_non_invertible_image():
    p = P(XY, x >= 0, x <= 1, y >= 2, y <= 3)
    assert p.affine_image("x", y + DT) == P(XY, (x - y).equals(DT), y >= 2, y <= 3)


def test_forget_examples():
    assert P(XY, x.equals(1), y.equals(2)).forget("y") == P(XY, x.equals(1))
    assert Polyhedron.empty(XY).forget("y").is_empty()
    rows = [[0, 1, 0], [0, -1, 1], [1, 0, -1]]  # x >= 0, y - x >= 0, 1 - y >= 0
    fm = oracles.fourier_motzkin(rows, 2)
    expect = Polyhedron.from_constraints(XY, [Constraint(LinearExpr({"x": r[1]}, r[0])) for r in fm])
    got = P(XY, x >= 0, x <= y, y <= 1).forget("y")
    assert got == expect == P(XY, x >= 0, x <= 1)


def test_entails_examples():
    assert P(X, x >= 0, x <= 1).entails(x <= 5)
    assert not P(X, x >= 0, x <= 1 + DT).entails(x <= 1)
    assert Polyhedron.empty(X).entails(x >= 100)


def test_bounds_and_eval():
    p = P(X, x >= 1 - 2 * DT, x <= 12 + DT)
    lo, hi = p.bounds("x")
    assert (lo, hi) == (1 - 2 * DT, 12 + DT)
    assert p.eval_at(Fraction(1, 5)) == P(X, x >= Fraction(3, 5), x <= Fraction(61, 5))
    assert P(X, x >= 0).bounds("x") == (0, None)


def test_canonical_rendering():
    p = P(XY, 2 * x + 4 * y >= 6, (3 * x).equals(3 * y))
    # inequalities are reduced modulo the equalities
    assert p.render_constraints() == ["x - y = 0", "y >= 1"]
    assert p.constraint_count() == 3
    assert P(X, x >= 0, x <= 1).constraint_count() == 2


def test_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        Polyhedron.universe(X).meet(Polyhedron.universe(XY))


# -- properties ---------------------------------------------------------------

@CASES
@given(polyhedra(max_constraints=6))
def test_round_trip(p):
    gens = p.generators
    q = Polyhedron.from_generators(p.dims, gens)
    r = Polyhedron.from_constraints(p.dims, q.constraints)
    assert p == r
    for c in p.constraints:
        assert q.entails(c)


@settings(max_examples=300)
@given(polyhedra(), polyhedra(), polyhedra())
def test_lattice_laws(p, q, r):
    assume(p.dims == q.dims == r.dims)
    m, j = p.meet(q), p.join(q)
    assert p.includes(m) and q.includes(m)
    assert j.includes(p) and j.includes(q)
    assert p.includes(p)
    # monotonicity
    assert p.join(r).includes(m.join(r))
    assert j.meet(r).includes(m.meet(r))
    # transitivity along a chain
    assert j.join(r).includes(p)


@st.composite
def rational_polytopes(draw):
    dims = draw(st.sampled_from([DIMS[1], DIMS[2], DIMS[3]]))
    const = small_ints.map(DtScalar)
    cs = draw(st.lists(constraints(dims, const=const), max_size=4))
    return dims, cs


def _rows(cs, dims):
    return [[c.expr.constant.to_rational()] + [c.expr.coeff(v).to_rational() for v in dims] for c in cs]


def _box(dims):
    out = []
    for v in dims:
        e = LinearExpr.var(v)
        out += [e >= -5, e <= 5]
    return out


@settings(max_examples=300)
@given(rational_polytopes())
def test_vertices_match_enumeration(system):
    dims, cs = system
    cs = cs + _box(dims)
    p = Polyhedron.from_constraints(dims, cs)
    got = {tuple(g.coords[v].to_rational() for v in dims) for g in p.generators if g.kind is GenKind.POINT}
    assert all(g.kind is GenKind.POINT for g in p.generators)
    assert got == oracles.vertices(_rows(cs, dims), len(dims))


@settings(max_examples=300)
@given(rational_polytopes(), st.integers(0, 2))
def test_forget_matches_fourier_motzkin(system, k):
    dims, cs = system
    k = k % len(dims)
    p = Polyhedron.from_constraints(dims, cs)
    rows = oracles.fourier_motzkin(_rows(cs, dims), k + 1)
    expect = Polyhedron.from_constraints(
        dims, [Constraint(LinearExpr(dict(zip(dims, r[1:])), r[0])) for r in rows])
    assert p.forget(dims[k]) == expect


@settings(max_examples=100)
@given(rational_polytopes(), rational_polytopes())
def test_join_vertices_are_hull_extremes(a, b):
    (da, ca), (db, cb) = a, b
    assume(da == db)
    p = Polyhedron.from_constraints(da, ca + _box(da))
    q = Polyhedron.from_constraints(da, cb + _box(da))
    pts = [tuple(g.coords[v].to_rational() for v in da) for r in (p, q) for g in r.generators]
    got = {tuple(g.coords[v].to_rational() for v in da) for g in p.join(q).generators}
    assert got == oracles.extreme_points(pts)


SAMPLE_DT = Fraction(1, 10**6)


def _numeric_generators(p, r):
    pts, rays, lines = [], [], []
    for g in p.generators:
        v = [g.coords[d].eval_at(r) for d in p.dims]
        {GenKind.POINT: pts, GenKind.RAY: rays, GenKind.LINE: lines}[g.kind].append(v)
    return pts, rays, lines


@CASES
@given(polyhedra(max_constraints=6),
       st.lists(st.lists(st.builds(Fraction, st.integers(-12, 12), st.integers(1, 2)),
                         min_size=3, max_size=3), min_size=1, max_size=3))
def test_membership_oracle_consistency(p, samples):
    assume(not p.is_empty())
    try:
        pts, rays, lines = _numeric_generators(p, SAMPLE_DT)
    except PoleError:
        assume(False)
    numeric = p.eval_at(SAMPLE_DT)
    probes = [s[:len(p.dims)] for s in samples] + pts[:2]
    for s in probes:
        store = dict(zip(p.dims, s))
        inside = all(c.satisfied_by(store) for c in numeric.constraints)
        assert inside == oracles.in_generated_set(s, pts, rays, lines)


@CASES
@given(polyhedra(dims=XY), st.one_of(small_ints.filter(bool).map(DtScalar), linear_dt.filter(lambda a: a.sign() != 0)),
       small_ints, linear_dt)
def test_invertible_update_round_trip(p, a, b, c):
    fwd = x.scale(a) + y.scale(b) + c
    back = (x - y.scale(b) - c).scale(a.inverse())
    assert p.affine_image("x", fwd).affine_image("x", back) == p
