"""Closed convex polyhedra over Q(dt) in double description.

A polyhedron on variables ``dims`` is kept as a homogenised cone in
dimension ``n + 1``.  Column 0 is the homogenising coordinate: a constraint
row ``(b, a_1 .. a_n)`` means ``b + sum a_i x_i >= 0`` (or ``= 0``), and a
generator ``(xi, x_1 .. x_n)`` is a point when ``xi > 0`` (coordinates
``x_i / xi``) and a ray or line when ``xi = 0``.

All vector entries are polynomials in dt (:class:`~hyperpoly.dtfield.Poly`);
conversion between the two representations uses Chernikova's incremental
double description method with the combinatorial adjacency test, which only
needs ring operations and the sign rule of the ordered field.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .dtfield import DtScalar, Poly, ZERO, ONE, as_scalar

__all__ = [
    "LinearExpr",
    "Relation",
    "Constraint",
    "GenKind",
    "Generator",
    "Polyhedron",
    "constraints_to_generators",
    "generators_to_constraints",
]

Vec = tuple  # tuple[Poly, ...]

_PZERO = Poly(())
_PONE = Poly((1,))


# ---------------------------------------------------------------------------
# linear expressions and constraints


class LinearExpr:
    """``sum coeffs[v] * v + constant`` with DtScalar coefficients."""

    __slots__ = ("coeffs", "constant")

    def __init__(self, coeffs: Mapping[str, object] | None = None, constant=0):
        cs = {}
        for v, c in (coeffs or {}).items():
            c = as_scalar(c)
            if not c.is_zero():
                cs[v] = c
        self.coeffs: dict[str, DtScalar] = cs
        self.constant: DtScalar = as_scalar(constant)

    @classmethod
    def var(cls, name: str) -> "LinearExpr":
        return cls({name: ONE})

    @classmethod
    def const(cls, c) -> "LinearExpr":
        return cls({}, c)

    def is_constant(self) -> bool:
        return not self.coeffs

    def variables(self) -> set[str]:
        return set(self.coeffs)

    def coeff(self, v: str) -> DtScalar:
        return self.coeffs.get(v, ZERO)

    def __add__(self, other) -> "LinearExpr":
        other = _as_expr(other)
        cs = dict(self.coeffs)
        for v, c in other.coeffs.items():
            cs[v] = cs.get(v, ZERO) + c
        return LinearExpr(cs, self.constant + other.constant)

    __radd__ = __add__

    def __neg__(self) -> "LinearExpr":
        return LinearExpr({v: -c for v, c in self.coeffs.items()}, -self.constant)

    def __sub__(self, other) -> "LinearExpr":
        return self + (-_as_expr(other))

    def __rsub__(self, other) -> "LinearExpr":
        return _as_expr(other) - self

    def scale(self, k) -> "LinearExpr":
        k = as_scalar(k)
        return LinearExpr({v: c * k for v, c in self.coeffs.items()}, self.constant * k)

    def __mul__(self, k) -> "LinearExpr":
        if isinstance(k, LinearExpr):
            if k.is_constant():
                return self.scale(k.constant)
            if self.is_constant():
                return k.scale(self.constant)
            raise ValueError("product of two non-constant linear expressions")
        return self.scale(k)

    __rmul__ = __mul__

    def __ge__(self, other) -> "Constraint":
        return Constraint(self - _as_expr(other), Relation.GEQ)

    def __le__(self, other) -> "Constraint":
        return Constraint(_as_expr(other) - self, Relation.GEQ)

    def equals(self, other) -> "Constraint":
        return Constraint(self - _as_expr(other), Relation.EQ)

    def same_as(self, other: "LinearExpr") -> bool:
        return self.coeffs == other.coeffs and self.constant == other.constant

    def evaluate(self, store: Mapping[str, object]) -> DtScalar:
        acc = self.constant
        for v, c in self.coeffs.items():
            acc = acc + c * as_scalar(store[v])
        return acc

    def __repr__(self) -> str:
        return f"LinearExpr({format_linear(self.coeffs, self.constant)})"


def _as_expr(x) -> LinearExpr:
    if isinstance(x, LinearExpr):
        return x
    return LinearExpr.const(x)


def _fmt_coef_term(c: DtScalar, v: str, first: bool) -> str:
    neg = c.sign() < 0
    mag = -c if neg else c
    if mag == ONE:
        body = v
    else:
        s = str(mag)
        if mag.is_polynomial() and len([k for k in mag.num.coeffs if k]) > 1:
            s = f"({s})"
        elif not mag.is_polynomial():
            s = f"({s})"
        body = f"{s}*{v}"
    if first:
        return f"-{body}" if neg else body
    return f"- {body}" if neg else f"+ {body}"


def format_linear(coeffs: Mapping[str, DtScalar], constant: DtScalar | None = None,
                  order: Sequence[str] | None = None) -> str:
    names = list(order) if order is not None else sorted(coeffs)
    parts = []
    for v in names:
        c = coeffs.get(v)
        if c is None or c.is_zero():
            continue
        parts.append(_fmt_coef_term(c, v, not parts))
    if constant is not None and not constant.is_zero():
        neg = constant.sign() < 0
        s = str(-constant if neg else constant)
        if parts:
            if len([k for k in (-constant if neg else constant).num.coeffs if k]) > 1:
                s = f"({s})"
            parts.append(f"- {s}" if neg else f"+ {s}")
        else:
            parts.append(str(constant))
    return " ".join(parts) if parts else "0"


class Relation(enum.Enum):
    GEQ = ">="  # expr >= 0
    EQ = "="  # expr == 0


class Constraint:
    """``expr >= 0`` or ``expr == 0``."""

    __slots__ = ("expr", "relation")

    def __init__(self, expr: LinearExpr, relation: Relation = Relation.GEQ):
        self.expr = expr
        self.relation = relation

    @property
    def is_equality(self) -> bool:
        return self.relation is Relation.EQ

    def variables(self) -> set[str]:
        return self.expr.variables()

    def negate_relaxed(self) -> "Constraint":
        """Closure of the complement of an inequality: ``-expr >= 0``."""
        if self.is_equality:
            raise ValueError("cannot negate an equality into one constraint")
        return Constraint(-self.expr, Relation.GEQ)

    def satisfied_by(self, store: Mapping[str, object], dt=None) -> bool:
        """Exact test on a concrete store; ``dt`` substitutes the infinitesimal."""
        if dt is None:
            val = self.expr.evaluate(store)
            s = val.sign()
        else:
            acc = self.expr.constant.eval_at(dt)
            for v, c in self.expr.coeffs.items():
                acc += c.eval_at(dt) * Fraction(store[v])
            s = (acc > 0) - (acc < 0)
        return s == 0 if self.is_equality else s >= 0

    def key(self, dims: Sequence[str]) -> Vec:
        return _prim(_constraint_row(self, dims), oriented=not self.is_equality)

    def render(self, order: Sequence[str] | None = None) -> str:
        """``x >= 1 - 2*dt`` style rendering (variables on the left)."""
        coeffs = self.expr.coeffs
        names = list(order) if order is not None else sorted(coeffs)
        names = [v for v in names if v in coeffs] + sorted(v for v in coeffs if v not in names)
        rhs = -self.expr.constant
        if not names:
            op = "=" if self.is_equality else ">="
            return f"0 {op} {rhs}"
        lead = coeffs[names[0]]
        op = "=" if self.is_equality else ">="
        if lead.sign() < 0:
            coeffs = {v: -c for v, c in coeffs.items()}
            rhs = -rhs
            if not self.is_equality:
                op = "<="
        return f"{format_linear(coeffs, None, names)} {op} {rhs}"

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"Constraint({self.render()})"


class GenKind(enum.Enum):
    POINT = "point"
    RAY = "ray"
    LINE = "line"


@dataclass(frozen=True)
class Generator:
    kind: GenKind
    coords: Mapping[str, DtScalar]

    @classmethod
    def point(cls, **coords) -> "Generator":
        return cls(GenKind.POINT, {v: as_scalar(c) for v, c in coords.items()})

    @classmethod
    def ray(cls, **coords) -> "Generator":
        return cls(GenKind.RAY, {v: as_scalar(c) for v, c in coords.items()})

    @classmethod
    def line(cls, **coords) -> "Generator":
        return cls(GenKind.LINE, {v: as_scalar(c) for v, c in coords.items()})

    def __hash__(self) -> int:
        return hash((self.kind, tuple(sorted(self.coords.items()))))

    def __repr__(self) -> str:
        inner = ", ".join(f"{v}={c}" for v, c in self.coords.items())
        return f"{self.kind.value}({inner})"


# ---------------------------------------------------------------------------
# vector helpers


def _dot(a: Vec, b: Vec) -> Poly:
    acc = _PZERO
    for x, y in zip(a, b):
        if x.coeffs and y.coeffs:
            acc = acc + x * y
    return acc


def _lin(c1: Poly, v1: Vec, c2: Poly, v2: Vec) -> Vec:
    return tuple(c1 * x + c2 * y for x, y in zip(v1, v2))


def _common_den(entries: Sequence[DtScalar]) -> Poly:
    """Least common denominator, normalised positive in the dt order."""
    den = _PONE
    for e in entries:
        if not e.den.is_constant():
            g = den.gcd(e.den)
            if g.sign() < 0:
                g = -g
            den = den * e.den.divmod(g)[0]
    return den


def _scalar_row(entries: Sequence[DtScalar]) -> list[Poly]:
    """Clear denominators of DtScalar entries with a positive multiplier."""
    den = _common_den(entries)
    out = []
    for e in entries:
        if e.den.is_constant():
            out.append(e.num * den)
        else:
            out.append(e.num * den.divmod(e.den)[0])
    return out


def _prim(vec: Sequence, oriented: bool) -> Vec:
    """Canonical representative of the ray (oriented) or line through ``vec``.

    Entries are polynomials with no common polynomial factor; the first
    nonzero entry, scanning columns 1..n then column 0, has lowest-degree
    coefficient of absolute value 1 (and equal to +1 when not oriented).
    """
    if vec and isinstance(vec[0], DtScalar):
        vec = _scalar_row(vec)
    g = None
    for x in vec:
        if x.coeffs:
            g = x if g is None else g.gcd(x)
            if g.is_constant():
                break
    if g is None:
        return tuple(_PZERO for _ in vec)
    if not g.is_constant():
        if g.sign() < 0:
            g = -g
        vec = [x.divmod(g)[0] if x.coeffs else x for x in vec]
    order = list(range(1, len(vec))) + [0]
    lead = None
    for i in order:
        if vec[i].coeffs:
            lead = vec[i].low()
            break
    scale = 1 / abs(lead) if oriented else 1 / lead
    if scale != 1:
        vec = [x.scale(scale) for x in vec]
    return tuple(vec)


def _sign(p: Poly) -> int:
    return p.sign()


def _constraint_row(c: Constraint, dims: Sequence[str]) -> list[DtScalar]:
    extra = set(c.expr.coeffs) - set(dims)
    if extra:
        raise ValueError(f"constraint mentions unknown variables {sorted(extra)}")
    return [c.expr.constant] + [c.expr.coeff(v) for v in dims]


def _generator_row(g: Generator, dims: Sequence[str]) -> list[DtScalar]:
    extra = set(g.coords) - set(dims)
    if extra:
        raise ValueError(f"generator mentions unknown variables {sorted(extra)}")
    xi = ONE if g.kind is GenKind.POINT else ZERO
    return [xi] + [as_scalar(g.coords.get(v, ZERO)) for v in dims]


# ---------------------------------------------------------------------------
# Chernikova / double description


def _double_description(rows: Sequence[tuple[Vec, bool]], d: int):
    """Minimal generators (lines, rays) of ``{y : row.y >= 0 (or = 0)}`` in Q(dt)^d.

    Starts from the whole space and adds one row at a time.  Each ray carries
    the bitmask of inequality rows it saturates, used by the combinatorial
    adjacency test.
    """
    lines: list[Vec] = [
        tuple(_PONE if j == i else _PZERO for j in range(d)) for i in range(d)
    ]
    rays: list[tuple[Vec, int]] = []
    seen_mask = 0
    for k, (row, is_eq) in enumerate(rows):
        bit = 0 if is_eq else (1 << k)
        svals = [_dot(row, l) for l in lines]
        pivot = next((i for i, s in enumerate(svals) if s.coeffs), None)
        if pivot is not None:
            piv = lines[pivot]
            sp = svals[pivot]
            if sp.sign() < 0:
                piv = tuple(-x for x in piv)
                sp = -sp
            new_lines = []
            for i, l in enumerate(lines):
                if i == pivot:
                    continue
                s = svals[i]
                if s.coeffs:
                    l = _prim(_lin(sp, l, -s, piv), oriented=False)
                new_lines.append(l)
            new_rays = []
            for r, mask in rays:
                s = _dot(row, r)
                if s.coeffs:
                    r = _prim(_lin(sp, r, -s, piv), oriented=True)
                new_rays.append((r, mask | bit))
            if not is_eq:
                new_rays.append((_prim(piv, oriented=True), seen_mask))
            lines, rays = new_lines, new_rays
            seen_mask |= bit
            continue

        pos, zero, neg = [], [], []
        for r, mask in rays:
            s = _dot(row, r)
            sg = s.sign()
            if sg > 0:
                pos.append((r, mask, s))
            elif sg < 0:
                neg.append((r, mask, s))
            else:
                zero.append((r, mask | bit))
        seen_mask |= bit
        if not neg and not is_eq:
            rays = [(r, m) for r, m, _ in pos] + zero
            continue
        all_masks = [m for _, m, _ in pos] + [m for _, m in zero] + [m for _, m, _ in neg]
        combos = []
        for ip, (rp, mp, sp) in enumerate(pos):
            for jn, (rn, mn, sn) in enumerate(neg):
                common = mp & mn
                adjacent = True
                for idx, m in enumerate(all_masks):
                    if idx == ip or idx == len(pos) + len(zero) + jn:
                        continue
                    if common & ~m == 0:
                        adjacent = False
                        break
                if adjacent:
                    r = _prim(_lin(sp, rn, -sn, rp), oriented=True)
                    combos.append((r, common | bit))
        if is_eq:
            rays = zero + combos
        else:
            rays = [(r, m) for r, m, _ in pos] + zero + combos
    return lines, [r for r, _ in rays]


def _positivity(d: int) -> Vec:
    return tuple(_PONE if j == 0 else _PZERO for j in range(d))


def _rref(rows: list[Vec], reduce: list[Vec], cols: Sequence[int], oriented_reduce: bool):
    """Reduced echelon form of ``rows`` on ``cols``; reduce other vectors by it."""
    basis: list[Vec] = []
    pivots: list[int] = []
    work = list(rows)
    for col in cols:
        idx = next((i for i, r in enumerate(work) if r[col].coeffs), None)
        if idx is None:
            continue
        p = work.pop(idx)
        if p[col].sign() < 0:
            p = tuple(-x for x in p)
        pc = p[col]
        work = [_prim(_lin(pc, r, -r[col], p), False) if r[col].coeffs else r for r in work]
        basis = [_prim(_lin(pc, b, -b[col], p), False) if b[col].coeffs else b for b in basis]
        basis.append(_prim(p, False))
        pivots.append(col)
    out = []
    for v in reduce:
        for b, col in zip(basis, pivots):
            if v[col].coeffs:
                v = _lin(b[col], v, -v[col], b)
        out.append(_prim(v, oriented_reduce))
    return basis, out


@dataclass(frozen=True)
class _ConSys:
    eqs: tuple  # tuple[Vec]
    ineqs: tuple


@dataclass(frozen=True)
class _GenSys:
    lines: tuple
    rays: tuple  # xi == 0
    points: tuple  # xi > 0


def _cons_to_gens(cs: _ConSys, d: int) -> _GenSys:
    rows = [(_positivity(d), False)]
    rows += [(e, True) for e in cs.eqs]
    rows += [(i, False) for i in cs.ineqs]
    lines, rays = _double_description(rows, d)
    pts = tuple(r for r in rays if r[0].coeffs)
    if not pts:
        return _GenSys((), (), ())
    rs = tuple(r for r in rays if not r[0].coeffs)
    return _canon_gens(lines, rs, pts, d)


def _canon_gens(lines, rays, points, d) -> _GenSys:
    cols = range(1, d)
    basis, red = _rref(list(lines), list(rays) + list(points), cols, True)
    nr = len(rays)
    rs = tuple(sorted(set(r for r in red[:nr] if any(x.coeffs for x in r)), key=_vkey))
    ps = tuple(sorted(set(red[nr:]), key=_vkey))
    return _GenSys(tuple(basis), rs, ps)


def _gens_to_cons(gs: _GenSys, d: int) -> _ConSys:
    if not gs.points:
        return _EMPTY_CONS(d)
    rows = [(l, True) for l in gs.lines]
    rows += [(p, False) for p in gs.points]
    rows += [(r, False) for r in gs.rays]
    lines, rays = _double_description(rows, d)
    pos = _positivity(d)
    ineqs = [r for r in rays if any(x.coeffs for x in r[1:])]
    basis, red = _rref(list(lines), ineqs, range(1, d), True)
    # a reduced inequality that lost all variable coefficients is the
    # positivity constraint in disguise
    red = [r for r in red if any(x.coeffs for x in r[1:]) and r != pos]
    return _ConSys(tuple(basis), tuple(sorted(set(red), key=_vkey)))


def _EMPTY_CONS(d: int) -> _ConSys:
    # -1 >= 0
    return _ConSys((), (tuple(Poly((-1,)) if j == 0 else _PZERO for j in range(d)),))


def _vkey(v: Vec):
    return tuple(tuple(x.coeffs) for x in v[1:]) + (tuple(v[0].coeffs),)


# ---------------------------------------------------------------------------
# polyhedron


class Polyhedron:
    """Immutable convex polyhedron over an ordered list of variables.

    Constructed from constraints or generators; the other representation and
    the minimised forms are computed on first use and cached.
    """

    def __init__(self, dims: Sequence[str], *, _cons: _ConSys | None = None,
                 _gens: _GenSys | None = None, _min_cons: bool = False,
                 _min_gens: bool = False):
        self.dims: tuple[str, ...] = tuple(dims)
        if len(set(self.dims)) != len(self.dims):
            raise ValueError(f"duplicate dimensions in {self.dims}")
        self._raw_cons = _cons
        self._raw_gens = _gens
        if _gens is not None and _min_gens:
            self.__dict__["_gens"] = _gens
        if _cons is not None and _min_cons:
            self.__dict__["_cons"] = _cons

    # -- construction ----------------------------------------------------
    @classmethod
    def universe(cls, dims: Sequence[str]) -> "Polyhedron":
        return cls(dims, _cons=_ConSys((), ()))

    @classmethod
    def empty(cls, dims: Sequence[str]) -> "Polyhedron":
        d = len(dims) + 1
        return cls(dims, _cons=_EMPTY_CONS(d), _gens=_GenSys((), (), ()),
                   _min_cons=True, _min_gens=True)

    @classmethod
    def from_constraints(cls, dims: Sequence[str], constraints: Iterable[Constraint]) -> "Polyhedron":
        dims = tuple(dims)
        eqs, ineqs = [], []
        for c in constraints:
            row = _constraint_row(c, dims)
            if c.is_equality:
                eqs.append(_prim(row, False))
            else:
                ineqs.append(_prim(row, True))
        return cls(dims, _cons=_ConSys(tuple(eqs), tuple(ineqs)))

    @classmethod
    def from_generators(cls, dims: Sequence[str], generators: Iterable[Generator]) -> "Polyhedron":
        dims = tuple(dims)
        lines, rays, points = [], [], []
        for g in generators:
            row = _generator_row(g, dims)
            if g.kind is GenKind.LINE:
                if all(e.is_zero() for e in row):
                    continue
                lines.append(_prim(row, False))
            elif g.kind is GenKind.RAY:
                if all(e.is_zero() for e in row):
                    continue
                rays.append(_prim(row, True))
            else:
                points.append(_prim(row, True))
        if not points:
            if lines or rays:
                raise ValueError("a nonempty generator system needs at least one point")
            return cls.empty(dims)
        return cls(dims, _gens=_GenSys(tuple(lines), tuple(rays), tuple(points)))

    @classmethod
    def point(cls, dims: Sequence[str], **coords) -> "Polyhedron":
        return cls.from_generators(dims, [Generator.point(**coords)])

    # -- representations -------------------------------------------------
    @property
    def _d(self) -> int:
        return len(self.dims) + 1

    @cached_property
    def _gens(self) -> _GenSys:
        if self._raw_gens is not None:
            # non-minimal generator input: minimise through constraints
            return _cons_to_gens(self._cons, self._d)
        return _cons_to_gens(self._raw_cons, self._d)

    @cached_property
    def _cons(self) -> _ConSys:
        if self._raw_gens is not None:
            raw = self._raw_gens
            if not raw.points:
                return _EMPTY_CONS(self._d)
            return _gens_to_cons(raw, self._d)
        return _gens_to_cons(self._gens, self._d)

    def is_empty(self) -> bool:
        if self._raw_gens is not None:
            return not self._raw_gens.points
        return not self._gens.points

    def is_universe(self) -> bool:
        return not self.is_empty() and not self._cons.eqs and not self._cons.ineqs

    @property
    def constraints(self) -> list[Constraint]:
        """Minimised, canonically scaled constraint system."""
        if self.is_empty():
            return [Constraint(LinearExpr.const(-1), Relation.GEQ)]
        out = [self._row_constraint(e, Relation.EQ) for e in self._cons.eqs]
        out += [self._row_constraint(i, Relation.GEQ) for i in self._cons.ineqs]
        return out

    @property
    def inequalities(self) -> list[Constraint]:
        """Minimised constraints with every equality split into two inequalities."""
        if self.is_empty():
            return self.constraints
        out = []
        for c in self.constraints:
            if c.is_equality:
                out.append(Constraint(c.expr, Relation.GEQ))
                out.append(Constraint(-c.expr, Relation.GEQ))
            else:
                out.append(c)
        return out

    @property
    def generators(self) -> list[Generator]:
        g = self._gens
        out = [self._row_generator(p, GenKind.POINT) for p in g.points]
        out += [self._row_generator(r, GenKind.RAY) for r in g.rays]
        out += [self._row_generator(l, GenKind.LINE) for l in g.lines]
        return out

    def _row_constraint(self, row: Vec, rel: Relation) -> Constraint:
        coeffs = {v: DtScalar._canon(row[i + 1], _PONE) for i, v in enumerate(self.dims)}
        return Constraint(LinearExpr(coeffs, DtScalar._canon(row[0], _PONE)), rel)

    def _row_generator(self, row: Vec, kind: GenKind) -> Generator:
        if kind is GenKind.POINT:
            xi = DtScalar(row[0])
            coords = {v: DtScalar(row[i + 1]) / xi for i, v in enumerate(self.dims)}
        else:
            coords = {v: DtScalar._canon(row[i + 1], _PONE) for i, v in enumerate(self.dims)}
        return Generator(kind, coords)

    def _any_gens(self) -> _GenSys:
        # generators good enough for inclusion tests, minimal or not
        if "_gens" in self.__dict__:
            return self.__dict__["_gens"]
        if self._raw_gens is not None:
            return self._raw_gens
        return self._gens

    def _any_cons(self) -> _ConSys:
        if "_cons" in self.__dict__:
            return self.__dict__["_cons"]
        if self._raw_cons is not None:
            return self._raw_cons
        return self._cons

    def _check_dims(self, other: "Polyhedron") -> None:
        if self.dims != other.dims:
            raise ValueError(f"dimension mismatch: {self.dims} vs {other.dims}")

    # -- lattice ---------------------------------------------------------
    def meet(self, other: "Polyhedron") -> "Polyhedron":
        self._check_dims(other)
        if self.is_empty():
            return self
        if other.is_empty():
            return other
        a, b = self._any_cons(), other._any_cons()
        return Polyhedron(self.dims, _cons=_ConSys(a.eqs + b.eqs, a.ineqs + b.ineqs))

    def add_constraints(self, cs: Iterable[Constraint]) -> "Polyhedron":
        return self.meet(Polyhedron.from_constraints(self.dims, cs))

    def join(self, other: "Polyhedron") -> "Polyhedron":
        """Convex hull of the union."""
        self._check_dims(other)
        if self.is_empty():
            return other
        if other.is_empty():
            return self
        a, b = self._any_gens(), other._any_gens()
        return Polyhedron(self.dims, _gens=_GenSys(a.lines + b.lines, a.rays + b.rays,
                                                   a.points + b.points))

    def includes(self, other: "Polyhedron") -> bool:
        """``other`` is a subset of ``self``."""
        self._check_dims(other)
        if other.is_empty():
            return True
        if self.is_empty():
            return False
        cs = self._any_cons()
        gs = other._any_gens()
        for e in cs.eqs:
            for g in gs.points + gs.rays + gs.lines:
                if _dot(e, g).coeffs:
                    return False
        for c in cs.ineqs:
            for g in gs.lines:
                if _dot(c, g).coeffs:
                    return False
            for g in gs.points + gs.rays:
                if _dot(c, g).sign() < 0:
                    return False
        return True

    def __le__(self, other: "Polyhedron") -> bool:
        return other.includes(self)

    def __ge__(self, other: "Polyhedron") -> bool:
        return self.includes(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polyhedron):
            return NotImplemented
        return self.dims == other.dims and self.includes(other) and other.includes(self)

    __hash__ = None  # mutable-free but equality is semantic

    def entails(self, c: Constraint) -> bool:
        """Every point of the polyhedron satisfies ``c``."""
        if self.is_empty():
            return True
        row = _prim(_constraint_row(c, self.dims), oriented=not c.is_equality)
        gs = self._any_gens()
        for g in gs.lines:
            if _dot(row, g).coeffs:
                return False
        for g in gs.points + gs.rays:
            s = _dot(row, g)
            if c.is_equality:
                if s.coeffs:
                    return False
            elif s.sign() < 0:
                return False
        return True

    def contains_point(self, store: Mapping[str, object]) -> bool:
        if self.is_empty():
            return False
        return all(c.satisfied_by(store) for c in self.constraints)

    # -- transformers ----------------------------------------------------
    def affine_image(self, var: str, expr: LinearExpr) -> "Polyhedron":
        """Image under the assignment ``var := expr``."""
        if var not in self.dims:
            raise ValueError(f"unknown variable {var}")
        extra = expr.variables() - set(self.dims)
        if extra:
            raise ValueError(f"expression mentions unknown variables {sorted(extra)}")
        if self.is_empty():
            return self
        k = self.dims.index(var) + 1
        row = _scalar_row([expr.constant] + [expr.coeff(v) for v in self.dims])
        # row carries a positive common multiplier m; new_k = (row . g) / m
        m = _common_den([expr.constant] + [expr.coeff(v) for v in self.dims])

        def image(g: Vec, oriented: bool) -> Vec:
            new = [x * m for x in g]
            new[k] = _dot(row, g)
            return _prim(new, oriented)

        gs = self._any_gens()
        out = _GenSys(
            tuple(image(l, False) for l in gs.lines),
            tuple(image(r, True) for r in gs.rays),
            tuple(image(p, True) for p in gs.points),
        )
        out = _GenSys(tuple(l for l in out.lines if any(x.coeffs for x in l)),
                      tuple(r for r in out.rays if any(x.coeffs for x in r)), out.points)
        return Polyhedron(self.dims, _gens=out)

    def forget(self, var: str) -> "Polyhedron":
        """Drop all information about ``var`` (it stays a dimension)."""
        if var not in self.dims:
            raise ValueError(f"unknown variable {var}")
        if self.is_empty():
            return self
        k = self.dims.index(var) + 1
        line = tuple(_PONE if j == k else _PZERO for j in range(self._d))
        gs = self._any_gens()
        return Polyhedron(self.dims, _gens=_GenSys(gs.lines + (line,), gs.rays, gs.points))

    def bounds(self, var: str) -> tuple[DtScalar | None, DtScalar | None]:
        """Infimum and supremum of ``var`` (None when unbounded)."""
        if self.is_empty():
            raise ValueError("bounds of an empty polyhedron")
        k = self.dims.index(var) + 1
        g = self._gens
        if any(l[k].coeffs for l in g.lines):
            return None, None
        up = any(r[k].sign() > 0 for r in g.rays)
        down = any(r[k].sign() < 0 for r in g.rays)
        vals = [DtScalar(p[k], p[0]) for p in g.points]
        lo = None if down else min(vals)
        hi = None if up else max(vals)
        return lo, hi

    def eval_at(self, r) -> "Polyhedron":
        """Substitute ``dt := r`` in every constraint coefficient."""
        if self.is_empty():
            return self
        cs = []
        for c in self.constraints:
            coeffs = {v: as_scalar(x.eval_at(r)) for v, x in c.expr.coeffs.items()}
            cs.append(Constraint(LinearExpr(coeffs, c.expr.constant.eval_at(r)), c.relation))
        return Polyhedron.from_constraints(self.dims, cs)

    def constraint_count(self) -> int:
        """Number of inequalities in the minimised system (equalities count twice)."""
        if self.is_empty():
            return 0
        return 2 * len(self._cons.eqs) + len(self._cons.ineqs)

    # -- rendering -------------------------------------------------------
    def render_constraints(self) -> list[str]:
        if self.is_empty():
            return ["false"]
        return [c.render(self.dims) for c in self.constraints]

    def __repr__(self) -> str:
        if self.is_empty():
            return f"Polyhedron({list(self.dims)}, empty)"
        body = ", ".join(self.render_constraints()) or "universe"
        return f"Polyhedron({list(self.dims)}, {{{body}}})"


# ---------------------------------------------------------------------------
# free functions mirroring the representation conversions


def constraints_to_generators(constraints: Iterable[Constraint], dims: Sequence[str]) -> list[Generator]:
    return Polyhedron.from_constraints(dims, constraints).generators


def generators_to_constraints(generators: Iterable[Generator], dims: Sequence[str]) -> list[Constraint]:
    return Polyhedron.from_generators(dims, generators).constraints
