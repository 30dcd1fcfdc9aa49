"""Lexer, parser and normaliser for While^dt programs.

Concrete syntax::

    (*@ modes p:{0,1}, s:{0,1} *)
    l := 0; x := 1; p := 1; s := 0;
    while true do {
       if p = 1 then x := x + dt else x := x - 2 * dt;
       ...
    }

Statements are separated by ``;`` and grouped with braces; ``if`` without
``else`` gets a ``skip`` branch.  Comparisons ``< <= > >= = !=`` and the
connectives ``&& || !`` are accepted on the surface and reduced by
:func:`normalize` to ``<``, negation and conjunction in negation normal form
(disjunction survives only as the dual of a negated conjunction).
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterator, Mapping, Union

from .dtfield import DT
from .errors import AnalysisError, LexError, ParseError
from .polyhedra import Constraint, LinearExpr

log = logging.getLogger(__name__)

# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Var:
    name: str
    pos: tuple | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Lit:
    value: Fraction
    pos: tuple | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Dt:
    pos: tuple | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class BinOp:
    op: str  # + - * /
    left: "AExp"
    right: "AExp"
    pos: tuple | None = field(default=None, compare=False, repr=False)


AExp = Union[Var, Lit, Dt, BinOp]


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class And:
    left: "BExp"
    right: "BExp"


@dataclass(frozen=True)
class Or:
    left: "BExp"
    right: "BExp"


@dataclass(frozen=True)
class Not:
    arg: "BExp"


@dataclass(frozen=True)
class Lt:
    left: AExp
    right: AExp
    pos: tuple | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Cmp:
    """Surface comparison other than ``<``; removed by :func:`normalize`."""

    op: str  # <= > >= = !=
    left: AExp
    right: AExp
    pos: tuple | None = field(default=None, compare=False, repr=False)


BExp = Union[BoolLit, And, Or, Not, Lt, Cmp]


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Assign:
    var: str
    expr: AExp
    pos: tuple | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Seq:
    first: "Cmd"
    second: "Cmd"


@dataclass(frozen=True)
class If:
    cond: BExp
    then: "Cmd"
    orelse: "Cmd"


@dataclass(frozen=True)
class While:
    cond: BExp
    body: "Cmd"


Cmd = Union[Skip, Assign, Seq, If, While]


@dataclass(frozen=True)
class Program:
    body: Cmd
    mode_vars: Mapping[str, tuple[Fraction, ...]]
    numeric_vars: tuple[str, ...]

    def __post_init__(self):
        clash = set(self.mode_vars) & set(self.numeric_vars)
        if clash:
            raise ParseError(f"variables declared as modes and used numerically: {sorted(clash)}")

    @property
    def mode_names(self) -> tuple[str, ...]:
        return tuple(self.mode_vars)


# ---------------------------------------------------------------------------
# lexer


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int
    value: object = None

    @property
    def pos(self) -> tuple[int, int]:
        return (self.line, self.col)


KEYWORDS = {"skip", "if", "then", "else", "while", "do", "true", "false"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\(\*.*?\*\))
  | (?P<num>\d+\.\d*|\.\d+|\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>:=|<=|>=|==|!=|<>|&&|\|\||[-+*/<>=!(){};])
    """,
    re.VERBOSE | re.DOTALL,
)

_OP_KINDS = {
    ":=": "ASSIGN", "+": "PLUS", "-": "MINUS", "*": "STAR", "/": "SLASH",
    "<": "LT", "<=": "LE", ">": "GT", ">=": "GE", "=": "EQ", "==": "EQ",
    "!=": "NE", "<>": "NE", "&&": "AND", "||": "OR", "!": "NOT",
    "(": "LPAREN", ")": "RPAREN", "{": "LBRACE", "}": "RBRACE", ";": "SEMI",
}


def tokenize(src: str) -> list[Token]:
    """Split source text into tokens; comments and whitespace are dropped."""
    tokens: list[Token] = []
    i, line, line_start = 0, 1, 0
    n = len(src)
    while i < n:
        m = _TOKEN_RE.match(src, i)
        col = i - line_start + 1
        if m is None or (m.lastgroup == "op" and src.startswith("(*", i)):
            if src.startswith("(*", i):
                raise LexError("unterminated comment", (line, col))
            raise LexError(f"unexpected character {src[i]!r}", (line, col))
        kind = m.lastgroup
        text = m.group()
        if kind == "num":
            tokens.append(Token("NUM", text, line, col, Fraction(text)))
        elif kind == "ident":
            if text == "dt":
                tokens.append(Token("DT", text, line, col))
            elif text in KEYWORDS:
                tokens.append(Token(text.upper(), text, line, col))
            else:
                tokens.append(Token("IDENT", text, line, col, text))
        elif kind == "op":
            tokens.append(Token(_OP_KINDS[text], text, line, col))
        nl = text.count("\n")
        if nl:
            line += nl
            line_start = i + text.rindex("\n") + 1
        i = m.end()
    tokens.append(Token("EOF", "", line, i - line_start + 1))
    return tokens


# ---------------------------------------------------------------------------
# parser

_REL_OPS = {"LT": "<", "LE": "<=", "GT": ">", "GE": ">=", "EQ": "=", "NE": "!="}


class Parser:
    """Recursive descent over the token list (backtracks only on ``(``)."""

    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "EOF":
            self.i += 1
        return t

    def expect(self, kind: str, what: str | None = None) -> Token:
        t = self.tok
        if t.kind != kind:
            found = t.text or "end of input"
            raise ParseError(f"expected {what or kind.lower()}, found {found!r}", t.pos)
        return self.advance()

    def accept(self, kind: str) -> Token | None:
        if self.tok.kind == kind:
            return self.advance()
        return None

    # commands
    def parse_commands(self, stop: str) -> Cmd:
        cmds = [self.parse_command()]
        while self.accept("SEMI"):
            if self.tok.kind == stop:
                break
            cmds.append(self.parse_command())
        out = cmds[-1]
        for c in reversed(cmds[:-1]):
            out = Seq(c, out)
        return out

    def parse_command(self) -> Cmd:
        t = self.tok
        if t.kind == "SKIP":
            self.advance()
            return Skip()
        if t.kind == "LBRACE":
            self.advance()
            if self.accept("RBRACE"):
                return Skip()
            body = self.parse_commands("RBRACE")
            self.expect("RBRACE", "'}'")
            return body
        if t.kind == "IF":
            self.advance()
            cond = self.parse_bexp()
            self.expect("THEN", "'then'")
            then = self.parse_command()
            orelse: Cmd = Skip()
            if self.accept("ELSE"):
                orelse = self.parse_command()
            return If(cond, then, orelse)
        if t.kind == "WHILE":
            self.advance()
            cond = self.parse_bexp()
            self.expect("DO", "'do'")
            return While(cond, self.parse_command())
        if t.kind == "DT":
            raise ParseError("dt is a constant and cannot be assigned", t.pos)
        if t.kind == "IDENT":
            self.advance()
            self.expect("ASSIGN", "':='")
            return Assign(t.value, self.parse_aexp(), t.pos)
        raise ParseError(f"expected a command, found {t.text or 'end of input'!r}", t.pos)

    # boolean expressions
    def parse_bexp(self) -> BExp:
        left = self.parse_conj()
        while self.accept("OR"):
            left = Or(left, self.parse_conj())
        return left

    def parse_conj(self) -> BExp:
        left = self.parse_bnot()
        while self.accept("AND"):
            left = And(left, self.parse_bnot())
        return left

    def parse_bnot(self) -> BExp:
        if self.accept("NOT"):
            return Not(self.parse_bnot())
        return self.parse_batom()

    def parse_batom(self) -> BExp:
        t = self.tok
        if t.kind == "TRUE":
            self.advance()
            return BoolLit(True)
        if t.kind == "FALSE":
            self.advance()
            return BoolLit(False)
        if t.kind == "LPAREN":
            save = self.i
            self.advance()
            try:
                inner = self.parse_bexp()
                self.expect("RPAREN", "')'")
                if self.tok.kind not in _REL_OPS and self.tok.kind not in (
                        "PLUS", "MINUS", "STAR", "SLASH"):
                    return inner
            except ParseError:
                pass
            self.i = save
        return self.parse_comparison()

    def parse_comparison(self) -> BExp:
        left = self.parse_aexp()
        t = self.tok
        if t.kind not in _REL_OPS:
            raise ParseError(f"expected a comparison, found {t.text or 'end of input'!r}", t.pos)
        self.advance()
        right = self.parse_aexp()
        op = _REL_OPS[t.kind]
        if op == "<":
            return Lt(left, right, t.pos)
        return Cmp(op, left, right, t.pos)

    # arithmetic expressions
    def parse_aexp(self) -> AExp:
        left = self.parse_term()
        while self.tok.kind in ("PLUS", "MINUS"):
            t = self.advance()
            left = BinOp(t.text, left, self.parse_term(), t.pos)
        return left

    def parse_term(self) -> AExp:
        left = self.parse_factor()
        while self.tok.kind in ("STAR", "SLASH"):
            t = self.advance()
            left = BinOp(t.text, left, self.parse_factor(), t.pos)
        return left

    def parse_factor(self) -> AExp:
        t = self.tok
        if t.kind == "MINUS":
            self.advance()
            if self.tok.kind == "NUM":
                n = self.advance()
                return Lit(-n.value, t.pos)
            return BinOp("-", Lit(Fraction(0), t.pos), self.parse_factor(), t.pos)
        if t.kind == "NUM":
            self.advance()
            return Lit(t.value, t.pos)
        if t.kind == "DT":
            self.advance()
            return Dt(t.pos)
        if t.kind == "IDENT":
            self.advance()
            return Var(t.value, t.pos)
        if t.kind == "LPAREN":
            self.advance()
            e = self.parse_aexp()
            self.expect("RPAREN", "')'")
            return e
        raise ParseError(f"expected an expression, found {t.text or 'end of input'!r}", t.pos)


_PRAGMA_RE = re.compile(r"\(\*@\s*modes\s+(?P<body>.*?)\*\)", re.DOTALL)
_MODE_RE = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_']*)\s*:\s*\{([^}]*)\}\s*")


def parse_modes(text: str) -> dict[str, tuple[Fraction, ...]]:
    """Parse ``p:{0,1}, s:{0,1}`` into an ordered mode declaration."""
    out: dict[str, tuple[Fraction, ...]] = {}
    rest = text.strip()
    while rest:
        m = _MODE_RE.match(rest)
        if m is None:
            raise ParseError(f"malformed mode declaration {text!r}")
        name, vals = m.group(1), m.group(2)
        try:
            values = tuple(sorted({Fraction(v.strip()) for v in vals.split(",") if v.strip()}))
        except ValueError as exc:
            raise ParseError(f"non-rational mode value in {text!r}") from exc
        if not values:
            raise ParseError(f"mode {name} has no values")
        if name in out:
            raise ParseError(f"mode {name} declared twice")
        out[name] = values
        rest = rest[m.end():]
        if rest.startswith(","):
            rest = rest[1:]
        elif rest:
            raise ParseError(f"malformed mode declaration {text!r}")
    return out


def parse(tokens: list[Token], modes: Mapping[str, tuple] | None = None) -> Program:
    """Build a :class:`Program` from tokens (surface boolean forms kept)."""
    p = Parser(tokens)
    if p.tok.kind == "EOF":
        body: Cmd = Skip()
    else:
        body = p.parse_commands("EOF")
    if p.tok.kind != "EOF":
        raise ParseError(f"unexpected {p.tok.text!r} after program", p.tok.pos)
    modes = dict(modes or {})
    order = [v for v in variables_in_order(body) if v not in modes]
    return Program(body, modes, tuple(order))


def parse_program(src: str, modes: str | Mapping | None = None) -> Program:
    """Tokenize and parse source text; modes come from the pragma or ``modes``."""
    decl: dict = {}
    m = _PRAGMA_RE.search(src)
    if m:
        decl = parse_modes(m.group("body"))
    if modes:
        decl = parse_modes(modes) if isinstance(modes, str) else dict(modes)
    prog = parse(tokenize(src), decl)
    for w in uninitialized_reads(prog.body):
        log.warning("variable %s may be read before assignment", w)
    return prog


def with_modes(p: Program, modes: str | Mapping) -> Program:
    """Re-declare the mode variables of an already parsed program."""
    decl = parse_modes(modes) if isinstance(modes, str) else dict(modes)
    order = [v for v in variables_in_order(p.body) if v not in decl]
    return Program(p.body, decl, tuple(order))


def parse_bexp_text(src: str) -> BExp:
    p = Parser(tokenize(src))
    b = p.parse_bexp()
    if p.tok.kind != "EOF":
        raise ParseError(f"unexpected {p.tok.text!r}", p.tok.pos)
    return b


def parse_aexp_text(src: str) -> AExp:
    p = Parser(tokenize(src))
    a = p.parse_aexp()
    if p.tok.kind != "EOF":
        raise ParseError(f"unexpected {p.tok.text!r}", p.tok.pos)
    return a


# ---------------------------------------------------------------------------
# traversal helpers


def _aexp_vars(a: AExp) -> Iterator[str]:
    if isinstance(a, Var):
        yield a.name
    elif isinstance(a, BinOp):
        yield from _aexp_vars(a.left)
        yield from _aexp_vars(a.right)


def _bexp_vars(b: BExp) -> Iterator[str]:
    if isinstance(b, (And, Or)):
        yield from _bexp_vars(b.left)
        yield from _bexp_vars(b.right)
    elif isinstance(b, Not):
        yield from _bexp_vars(b.arg)
    elif isinstance(b, (Lt, Cmp)):
        yield from _aexp_vars(b.left)
        yield from _aexp_vars(b.right)


def variables_in_order(c: Cmd) -> list[str]:
    seen: dict[str, None] = {}

    def walk(c: Cmd) -> None:
        if isinstance(c, Assign):
            for v in _aexp_vars(c.expr):
                seen.setdefault(v)
            seen.setdefault(c.var)
        elif isinstance(c, Seq):
            walk(c.first)
            walk(c.second)
        elif isinstance(c, If):
            for v in _bexp_vars(c.cond):
                seen.setdefault(v)
            walk(c.then)
            walk(c.orelse)
        elif isinstance(c, While):
            for v in _bexp_vars(c.cond):
                seen.setdefault(v)
            walk(c.body)

    walk(c)
    return list(seen)


def uninitialized_reads(c: Cmd) -> list[str]:
    """Variables possibly read before any assignment (flow-insensitive for loops)."""
    bad: dict[str, None] = {}

    def walk(c: Cmd, defined: frozenset) -> frozenset:
        if isinstance(c, Assign):
            for v in _aexp_vars(c.expr):
                if v not in defined:
                    bad.setdefault(v)
            return defined | {c.var}
        if isinstance(c, Seq):
            return walk(c.second, walk(c.first, defined))
        if isinstance(c, If):
            for v in _bexp_vars(c.cond):
                if v not in defined:
                    bad.setdefault(v)
            return walk(c.then, defined) & walk(c.orelse, defined)
        if isinstance(c, While):
            for v in _bexp_vars(c.cond):
                if v not in defined:
                    bad.setdefault(v)
            walk(c.body, defined)
            return defined
        return defined

    walk(c, frozenset())
    return list(bad)


def while_loops(c: Cmd) -> list[While]:
    """Loops in source order (outer before inner)."""
    out: list[While] = []

    def walk(c: Cmd) -> None:
        if isinstance(c, While):
            out.append(c)
            walk(c.body)
        elif isinstance(c, Seq):
            walk(c.first)
            walk(c.second)
        elif isinstance(c, If):
            walk(c.then)
            walk(c.orelse)

    walk(c)
    return out


def flatten_seq(c: Cmd) -> list[Cmd]:
    if isinstance(c, Seq):
        return flatten_seq(c.first) + flatten_seq(c.second)
    return [c]


# ---------------------------------------------------------------------------
# normalisation


def nnf(b: BExp, positive: bool = True) -> BExp:
    """Negation normal form over ``<``; leaves are ``Lt`` or ``Not(Lt)``."""
    if isinstance(b, BoolLit):
        return BoolLit(b.value if positive else not b.value)
    if isinstance(b, And):
        l, r = nnf(b.left, positive), nnf(b.right, positive)
        return And(l, r) if positive else Or(l, r)
    if isinstance(b, Or):
        l, r = nnf(b.left, positive), nnf(b.right, positive)
        return Or(l, r) if positive else And(l, r)
    if isinstance(b, Not):
        return nnf(b.arg, not positive)
    if isinstance(b, Lt):
        return b if positive else Not(b)
    if isinstance(b, Cmp):
        return nnf(desugar(b), positive)
    raise TypeError(f"not a boolean expression: {b!r}")


def desugar(c: Cmp) -> BExp:
    a, b, pos = c.left, c.right, c.pos
    if c.op == "<=":
        return Not(Lt(b, a, pos))
    if c.op == ">=":
        return Not(Lt(a, b, pos))
    if c.op == ">":
        return Lt(b, a, pos)
    if c.op == "=":
        return And(Not(Lt(a, b, pos)), Not(Lt(b, a, pos)))
    if c.op == "!=":
        return Not(And(Not(Lt(a, b, pos)), Not(Lt(b, a, pos))))
    raise ValueError(f"unknown comparison {c.op}")


def normalize_cmd(c: Cmd) -> Cmd:
    if isinstance(c, Seq):
        return Seq(normalize_cmd(c.first), normalize_cmd(c.second))
    if isinstance(c, If):
        return If(nnf(c.cond), normalize_cmd(c.then), normalize_cmd(c.orelse))
    if isinstance(c, While):
        return While(nnf(c.cond), normalize_cmd(c.body))
    return c


def normalize(p: Program) -> Program:
    """Desugar comparisons and put every condition in negation normal form."""
    return replace(p, body=normalize_cmd(p.body))


def is_normalized(b: BExp) -> bool:
    if isinstance(b, BoolLit) or isinstance(b, Lt):
        return True
    if isinstance(b, Not):
        return isinstance(b.arg, Lt)
    if isinstance(b, (And, Or)):
        return is_normalized(b.left) and is_normalized(b.right)
    return False


# ---------------------------------------------------------------------------
# linearisation


def linearize(a: AExp, constants: Mapping[str, object] | None = None,
              dt_value=None) -> LinearExpr | None:
    """Affine form of ``a`` or None when it is not affine.

    ``constants`` maps variables (typically modes) to values folded in;
    ``dt_value`` replaces the infinitesimal by a number.  Division is only
    by nonzero constants.
    """
    constants = constants or {}

    def go(e: AExp) -> LinearExpr | None:
        if isinstance(e, Lit):
            return LinearExpr.const(e.value)
        if isinstance(e, Dt):
            return LinearExpr.const(DT if dt_value is None else dt_value)
        if isinstance(e, Var):
            if e.name in constants:
                return LinearExpr.const(constants[e.name])
            return LinearExpr.var(e.name)
        l, r = go(e.left), go(e.right)
        if l is None or r is None:
            return None
        if e.op == "+":
            return l + r
        if e.op == "-":
            return l - r
        if e.op == "*":
            if l.is_constant():
                return r.scale(l.constant)
            if r.is_constant():
                return l.scale(r.constant)
            return None
        if e.op == "/":
            if not r.is_constant():
                return None
            if r.constant.is_zero():
                raise AnalysisError("division by the constant zero", e.pos)
            return l.scale(r.constant.inverse())
        raise ValueError(f"unknown operator {e.op}")

    return go(a)


def collect_m_set(p: Program) -> list[Constraint]:
    """Threshold constraints: both orientations of every numeric comparison."""
    modes = set(p.mode_vars)
    out: list[Constraint] = []
    keys: set = set()
    dims = p.numeric_vars

    def leaf(lt: Lt) -> None:
        if (set(_aexp_vars(lt.left)) | set(_aexp_vars(lt.right))) & modes:
            return
        try:
            diff = linearize(BinOp("-", lt.right, lt.left))
        except AnalysisError:
            return
        if diff is None or diff.is_constant():
            return
        for c in (Constraint(diff), Constraint(-diff)):
            k = c.key(dims)
            if k not in keys:
                keys.add(k)
                out.append(c)

    def walk_b(b: BExp) -> None:
        if isinstance(b, (And, Or)):
            walk_b(b.left)
            walk_b(b.right)
        elif isinstance(b, Not):
            walk_b(b.arg)
        elif isinstance(b, Lt):
            leaf(b)
        elif isinstance(b, Cmp):
            walk_b(nnf(b))

    def walk(c: Cmd) -> None:
        if isinstance(c, Seq):
            walk(c.first)
            walk(c.second)
        elif isinstance(c, If):
            walk_b(c.cond)
            walk(c.then)
            walk(c.orelse)
        elif isinstance(c, While):
            walk_b(c.cond)
            walk(c.body)

    walk(p.body)
    return out


def substitute_dt(p: Program, r) -> Program:
    """Replace every ``dt`` by the positive literal ``r``."""
    r = Fraction(r)
    if r <= 0:
        raise ValueError("dt must be substituted by a positive value")

    def a(e: AExp) -> AExp:
        if isinstance(e, Dt):
            return Lit(r, e.pos)
        if isinstance(e, BinOp):
            return BinOp(e.op, a(e.left), a(e.right), e.pos)
        return e

    def b(e: BExp) -> BExp:
        if isinstance(e, (And, Or)):
            return type(e)(b(e.left), b(e.right))
        if isinstance(e, Not):
            return Not(b(e.arg))
        if isinstance(e, Lt):
            return Lt(a(e.left), a(e.right), e.pos)
        if isinstance(e, Cmp):
            return Cmp(e.op, a(e.left), a(e.right), e.pos)
        return e

    def c(e: Cmd) -> Cmd:
        if isinstance(e, Assign):
            return Assign(e.var, a(e.expr), e.pos)
        if isinstance(e, Seq):
            return Seq(c(e.first), c(e.second))
        if isinstance(e, If):
            return If(b(e.cond), c(e.then), c(e.orelse))
        if isinstance(e, While):
            return While(b(e.cond), c(e.body))
        return e

    return replace(p, body=c(p.body))


# ---------------------------------------------------------------------------
# pretty printing


def format_literal(q: Fraction) -> str:
    q = Fraction(q)
    d = q.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"({q.numerator}/{q.denominator})"
    k = max(twos, fives)
    if k == 0:
        return str(q.numerator)
    scaled = abs(q.numerator) * 10**k // q.denominator
    digits = str(scaled).rjust(k + 1, "0")
    sign = "-" if q < 0 else ""
    return f"{sign}{digits[:-k]}.{digits[-k:]}"


def pretty_aexp(a: AExp) -> str:
    if isinstance(a, Var):
        return a.name
    if isinstance(a, Dt):
        return "dt"
    if isinstance(a, Lit):
        return format_literal(a.value)
    return f"({pretty_aexp(a.left)} {a.op} {pretty_aexp(a.right)})"


def pretty_bexp(b: BExp) -> str:
    if isinstance(b, BoolLit):
        return "true" if b.value else "false"
    if isinstance(b, And):
        return f"({pretty_bexp(b.left)} && {pretty_bexp(b.right)})"
    if isinstance(b, Or):
        return f"({pretty_bexp(b.left)} || {pretty_bexp(b.right)})"
    if isinstance(b, Not):
        return f"!({pretty_bexp(b.arg)})"
    if isinstance(b, Lt):
        return f"{pretty_aexp(b.left)} < {pretty_aexp(b.right)}"
    return f"{pretty_aexp(b.left)} {b.op} {pretty_aexp(b.right)}"


def pretty(c: Cmd, indent: int = 0) -> str:
    pad = "   " * indent
    if isinstance(c, Skip):
        return f"{pad}skip"
    if isinstance(c, Assign):
        return f"{pad}{c.var} := {pretty_aexp(c.expr)}"
    if isinstance(c, Seq):
        first = _block(c.first, indent) if isinstance(c.first, Seq) else pretty(c.first, indent)
        return f"{first};\n{pretty(c.second, indent)}"
    if isinstance(c, If):
        return (f"{pad}if {pretty_bexp(c.cond)} then\n{_branch(c.then, indent + 1)}\n"
                f"{pad}else\n{_branch(c.orelse, indent + 1)}")
    if isinstance(c, While):
        return f"{pad}while {pretty_bexp(c.cond)} do\n{_branch(c.body, indent + 1)}"
    raise TypeError(f"not a command: {c!r}")


def _block(c: Cmd, indent: int) -> str:
    pad = "   " * indent
    return f"{pad}{{\n{pretty(c, indent + 1)}\n{pad}}}"


def _branch(c: Cmd, indent: int) -> str:
    if isinstance(c, (Seq, If, While)):
        return _block(c, indent)
    return pretty(c, indent)


def pretty_program(p: Program) -> str:
    head = ""
    if p.mode_vars:
        decl = ", ".join(
            f"{v}:{{{','.join(format_literal(x) for x in vals)}}}" for v, vals in p.mode_vars.items()
        )
        head = f"(*@ modes {decl} *)\n"
    return head + pretty(p.body) + "\n"
