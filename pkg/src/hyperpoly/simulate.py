"""Exact sectionwise execution (dt := 1/n) and containment checking.

Values live in Z[1/B] where B is the least common multiple of every literal
denominator after substituting dt; a value is a pair (m, e) meaning
m / B**e.  Sums and products then never need a gcd, which keeps long runs of
multiplicative updates (the thermostat) linear in the size of the numbers.
Division by anything other than a unit falls back to Fraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Callable, Iterable, Mapping, Sequence, Union

from .errors import SimulationError
from .frontend import (
    AExp, And, Assign, BExp, BinOp, BoolLit, Cmd, Dt, If, Lit, Lt, Not, Or,
    Program, Seq, Skip, Var, While, normalize, substitute_dt, while_loops,
)

if TYPE_CHECKING:
    from .analyzer import AbstractState

try:
    from gmpy2 import mpz as _big
except ImportError:  # plain ints are exact too, only slower on long runs
    _big = int

Scaled = tuple  # (m, e) with value m / B**e
Value = Union[Scaled, Fraction]


class _Powers:
    """Powers of the base: a permanent table for small exponents plus a short LRU."""

    SMALL = 64
    LRU = 4

    def __init__(self, base: int):
        self.base = _big(base)
        self.small = [_big(1)]
        for _ in range(self.SMALL):
            self.small.append(self.small[-1] * base)
        self.recent: dict[int, int] = {}

    def __call__(self, k: int) -> int:
        if k <= self.SMALL:
            return self.small[k]
        v = self.recent.get(k)
        if v is not None:
            return v
        prev = self.recent.get(k - 1)
        v = prev * self.base if prev is not None else self.base ** _big(k)
        if len(self.recent) >= self.LRU:
            del self.recent[min(self.recent)]
        self.recent[k] = v
        return v


class Arith:
    """Exact arithmetic on Z[1/B] pairs with a Fraction fallback."""

    def __init__(self, base: int):
        if base < 1:
            raise ValueError("base must be positive")
        self.base = base
        self.pow = _Powers(base)

    def lit(self, q: Fraction) -> Value:
        q = Fraction(q)
        if q.denominator == 1:
            return (_big(q.numerator), 0)
        if self.base % q.denominator:
            return q
        return (_big(q.numerator * (self.base // q.denominator)), 1)

    def to_fraction(self, v: Value) -> Fraction:
        if isinstance(v, Fraction):
            return v
        return Fraction(int(v[0]), int(self.pow(v[1])))

    def add(self, a: Value, b: Value) -> Value:
        if isinstance(a, tuple) and isinstance(b, tuple):
            (m1, e1), (m2, e2) = a, b
            if e1 == e2:
                return (m1 + m2, e1)
            if e1 < e2:
                return (m1 * self.pow(e2 - e1) + m2, e2)
            return (m1 + m2 * self.pow(e1 - e2), e1)
        return self.to_fraction(a) + self.to_fraction(b)

    def neg(self, a: Value) -> Value:
        if isinstance(a, tuple):
            return (-a[0], a[1])
        return -a

    def sub(self, a: Value, b: Value) -> Value:
        return self.add(a, self.neg(b))

    def mul(self, a: Value, b: Value) -> Value:
        if isinstance(a, tuple) and isinstance(b, tuple):
            m = a[0] * b[0]
            return (0, 0) if m == 0 else (m, a[1] + b[1])
        return self.to_fraction(a) * self.to_fraction(b)

    def div(self, a: Value, b: Value) -> Value:
        if self.sign(b) == 0:
            raise ZeroDivisionError("division by zero")
        if isinstance(a, tuple) and isinstance(b, tuple) and b[0] in (1, -1):
            # a / (u / B^e) = a * u * B^e for a unit u
            return (a[0] * b[0] * self.pow(b[1]), a[1])
        return self.to_fraction(a) / self.to_fraction(b)

    @staticmethod
    def sign(a: Value) -> int:
        x = a[0] if isinstance(a, tuple) else a
        return (x > 0) - (x < 0)

    def lt(self, a: Value, b: Value) -> bool:
        return self.sign(self.sub(b, a)) > 0


# ---------------------------------------------------------------------------
# compilation of the AST into closures over a store


def _lcm_denominators(p: Program) -> int:
    acc = 1

    def a(e: AExp) -> None:
        nonlocal acc
        if isinstance(e, Lit):
            acc = math.lcm(acc, e.value.denominator)
        elif isinstance(e, BinOp):
            a(e.left)
            a(e.right)

    def b(e: BExp) -> None:
        if isinstance(e, (And, Or)):
            b(e.left)
            b(e.right)
        elif isinstance(e, Not):
            b(e.arg)
        elif isinstance(e, Lt):
            a(e.left)
            a(e.right)

    def c(e: Cmd) -> None:
        if isinstance(e, Assign):
            a(e.expr)
        elif isinstance(e, Seq):
            c(e.first)
            c(e.second)
        elif isinstance(e, If):
            b(e.cond)
            c(e.then)
            c(e.orelse)
        elif isinstance(e, While):
            b(e.cond)
            c(e.body)

    c(p.body)
    return acc


Store = dict  # variable name -> Value


@dataclass(frozen=True)
class HeadStore:
    """Store observed at a loop head before the ``step``-th body iteration."""

    loop: int
    step: int
    values: Mapping[str, Value]
    arith: Arith = field(repr=False, compare=False)

    @classmethod
    def from_fractions(cls, values: Mapping[str, Fraction], loop: int = 0, step: int = 0) -> "HeadStore":
        ar = Arith(math.lcm(1, *(Fraction(v).denominator for v in values.values())))
        return cls(loop, step, {k: ar.lit(v) for k, v in values.items()}, ar)

    def as_fractions(self) -> dict[str, Fraction]:
        return {k: self.arith.to_fraction(v) for k, v in self.values.items()}

    def __getitem__(self, var: str) -> Fraction:
        return self.arith.to_fraction(self.values[var])


class _Stop(Exception):
    pass


class _Machine:
    def __init__(self, program: Program, max_steps: int):
        self.program = program
        self.ar = Arith(_lcm_denominators(program))
        self.max_steps = max_steps
        self.loop_ids = {id(w): i for i, w in enumerate(while_loops(program.body))}
        self.budget = max_steps
        self.truncated = False

    def aexp(self, e: AExp) -> Callable[[Store], Value]:
        ar = self.ar
        if isinstance(e, Lit):
            v = ar.lit(e.value)
            return lambda s: v
        if isinstance(e, Var):
            name, pos = e.name, e.pos

            def read(s: Store) -> Value:
                try:
                    return s[name]
                except KeyError:
                    raise SimulationError(f"variable {name} read before assignment", pos) from None
            return read
        if isinstance(e, Dt):
            raise SimulationError("dt must be substituted before simulation", e.pos)
        l, r = self.aexp(e.left), self.aexp(e.right)
        if e.op == "+":
            return lambda s: ar.add(l(s), r(s))
        if e.op == "-":
            return lambda s: ar.sub(l(s), r(s))
        if e.op == "*":
            return lambda s: ar.mul(l(s), r(s))
        pos = e.pos

        def divide(s: Store) -> Value:
            try:
                return ar.div(l(s), r(s))
            except ZeroDivisionError:
                visits = self.max_steps - self.budget
                raise SimulationError(f"division by zero after {visits} loop-head visits", pos) from None
        return divide

    def bexp(self, b: BExp) -> Callable[[Store], bool]:
        ar = self.ar
        if isinstance(b, BoolLit):
            v = b.value
            return lambda s: v
        if isinstance(b, And):
            l, r = self.bexp(b.left), self.bexp(b.right)
            return lambda s: l(s) and r(s)
        if isinstance(b, Or):
            l, r = self.bexp(b.left), self.bexp(b.right)
            return lambda s: l(s) or r(s)
        if isinstance(b, Not):
            f = self.bexp(b.arg)
            return lambda s: not f(s)
        if isinstance(b, Lt):
            l, r = self.aexp(b.left), self.aexp(b.right)
            return lambda s: ar.lt(l(s), r(s))
        raise TypeError(f"not a boolean expression: {b!r}")

    def cmd(self, c: Cmd, emit: Callable[[HeadStore], None]) -> Callable[[Store], None]:
        if isinstance(c, Skip):
            return lambda s: None
        if isinstance(c, Assign):
            var, f = c.var, self.aexp(c.expr)

            def assign(s: Store) -> None:
                s[var] = f(s)
            return assign
        if isinstance(c, Seq):
            a, b = self.cmd(c.first, emit), self.cmd(c.second, emit)

            def seq(s: Store) -> None:
                a(s)
                b(s)
            return seq
        if isinstance(c, If):
            g, t, o = self.bexp(c.cond), self.cmd(c.then, emit), self.cmd(c.orelse, emit)

            def branch(s: Store) -> None:
                (t if g(s) else o)(s)
            return branch
        if isinstance(c, While):
            g, body = self.bexp(c.cond), self.cmd(c.body, emit)
            lid = self.loop_ids[id(c)]
            ar = self.ar

            def loop(s: Store) -> None:
                step = 0
                while True:
                    if self.budget <= 0:
                        self.truncated = True
                        raise _Stop
                    self.budget -= 1
                    emit(HeadStore(lid, step, dict(s), ar))
                    if not g(s):
                        return
                    body(s)
                    step += 1
            return loop
        raise TypeError(f"not a command: {c!r}")


@dataclass
class SimulationRun:
    n: int
    stores: list[HeadStore]
    final: HeadStore | None
    truncated: bool


def section_program(p: Program, n: int) -> Program:
    if n < 1:
        raise ValueError("section index must be at least 1")
    return substitute_dt(normalize(p), Fraction(1, n))


def simulate_section(p: Program, n: int, max_steps: int) -> SimulationRun:
    """Run the dt = 1/n section for at most ``max_steps`` loop-head visits."""
    stores: list[HeadStore] = []
    final, truncated = run_section(p, n, max_steps, stores.append)
    return SimulationRun(n, stores, final, truncated)


def run_section(p: Program, n: int, max_steps: int,
                sink: Callable[[HeadStore], None]) -> tuple[HeadStore | None, bool]:
    """Stream loop-head stores into ``sink``; returns (final store, truncated).

    Long runs should use this instead of :func:`simulate_section`: stores of
    multiplicative systems grow linearly in size with the step count.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be nonnegative")
    prog = section_program(p, n)
    m = _Machine(prog, max_steps)
    body = m.cmd(prog.body, sink)
    s: Store = {}
    try:
        body(s)
    except _Stop:
        return None, True
    return HeadStore(-1, -1, dict(s), m.ar), False


# ---------------------------------------------------------------------------
# containment


@dataclass(frozen=True)
class Violation:
    loop: int
    step: int
    mode: tuple
    constraint: str
    store: Mapping[str, Fraction]

    def describe(self) -> str:
        vals = ", ".join(f"{k}={_short(v)}" for k, v in self.store.items())
        return f"loop {self.loop} step {self.step} mode {_mode_text(self.mode)}: {self.constraint} fails at {{{vals}}}"


def _short(q: Fraction) -> str:
    s = str(q)
    return s if len(s) <= 40 else f"~{float(q):.12g}"


def _mode_text(mode: tuple) -> str:
    return "(" + ", ".join(str(v) for v in mode) + ")"


@dataclass
class ContainmentReport:
    n: int
    checked: int = 0
    violations: list[Violation] = field(default_factory=list)
    truncated: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations


class _Checker:
    """Invariant constraints at dt = 1/n as integer rows, ready for Z[1/B] stores."""

    def __init__(self, invariants: Mapping[int, "AbstractState"], mode_names: Sequence[str],
                 n: int, limit: int = 20):
        self.mode_names = tuple(mode_names)
        self.limit = limit
        self.rows: dict[int, dict[tuple, list]] = {}
        r = Fraction(1, n)
        for lid, state in invariants.items():
            per_mode = {}
            for mode, poly in state.items():
                rows = []
                for c in poly.constraints:
                    const = c.expr.constant.eval_at(r)
                    coeffs = [(v, x.eval_at(r)) for v, x in c.expr.coeffs.items()]
                    den = math.lcm(const.denominator, *(q.denominator for _, q in coeffs))
                    rows.append((int(const * den), [(v, int(q * den)) for v, q in coeffs],
                                 c.is_equality, c.render(poly.dims)))
                per_mode[mode] = rows
            self.rows[lid] = per_mode

    def check(self, hs: HeadStore, report: ContainmentReport) -> None:
        report.checked += 1
        ar = hs.arith
        mode = tuple(ar.to_fraction(hs.values[m]) for m in self.mode_names) if self.mode_names else ()
        per_mode = self.rows.get(hs.loop)
        if per_mode is None:
            return  # loop never reached by the analysis: nothing claimed
        rows = per_mode.get(mode)
        if rows is None:
            self._fail(hs, mode, "mode valuation absent from invariant", report)
            return
        for const, coeffs, is_eq, text in rows:
            s = _row_sign(const, coeffs, hs.values, ar)
            if s < 0 or (is_eq and s != 0):
                self._fail(hs, mode, text, report)

    def _fail(self, hs: HeadStore, mode: tuple, text: str, report: ContainmentReport) -> None:
        if len(report.violations) < self.limit:
            report.violations.append(Violation(hs.loop, hs.step, mode, text, hs.as_fractions()))
        else:
            report.violations.append(Violation(hs.loop, hs.step, mode, text, {}))


def _row_sign(const: int, coeffs: list, values: Mapping[str, Value], ar: Arith) -> int:
    vals = [(k, values[v]) for v, k in coeffs]
    if all(isinstance(x, tuple) for _, x in vals):
        e = max((x[1] for _, x in vals), default=0)
        acc = const * ar.pow(e)
        for k, (m, ex) in vals:
            acc += k * m * (ar.pow(e - ex) if ex != e else 1)
        return (acc > 0) - (acc < 0)
    acc = Fraction(const)
    for k, x in vals:
        acc += k * ar.to_fraction(x)
    return (acc > 0) - (acc < 0)


def _invariants_of(result) -> tuple[dict, tuple]:
    from .analyzer import AbstractState

    if isinstance(result, AbstractState):
        return {0: result}, None
    return result.loop_head_invariants, result.mode_names


def check_containment(result, stores: Iterable[HeadStore], n: int,
                      mode_names: Sequence[str] | None = None) -> ContainmentReport:
    """Check every store against the invariant of its loop at dt = 1/n.

    ``result`` is an analysis result or a bare loop-head state (loop 0).
    """
    invariants, names = _invariants_of(result)
    checker = _Checker(invariants, mode_names if mode_names is not None else (names or ()), n)
    report = ContainmentReport(n)
    for hs in stores:
        checker.check(hs, report)
    return report


def check_section(result, program: Program, n: int, max_steps: int) -> ContainmentReport:
    """Simulate the dt = 1/n section and check containment while streaming."""
    invariants, names = _invariants_of(result)
    checker = _Checker(invariants, names or program.mode_names, n)
    report = ContainmentReport(n)
    _, report.truncated = run_section(program, n, max_steps, lambda hs: checker.check(hs, report))
    return report
