"""Exact arithmetic in Q(dt), rational functions of one positive infinitesimal.

Values are ratios of polynomials in ``dt`` with rational coefficients.  They
are ordered by their behaviour as ``dt -> 0+``: a nonzero value is positive
iff the lowest-degree coefficient of its numerator (with the denominator
normalised to a positive lowest-degree coefficient) is positive.  Every
positive rational is therefore larger than ``dt`` and ``1/dt`` is larger than
every rational.
"""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from numbers import Rational
from typing import Iterable, Sequence, Union

__all__ = [
    "Poly",
    "DtScalar",
    "DT",
    "ZERO",
    "ONE",
    "Infinite",
    "INFINITE",
    "PoleError",
    "as_scalar",
    "parse_rational",
    "format_rational",
]


class PoleError(ZeroDivisionError):
    """Raised when a rational function is evaluated at a root of its denominator."""


def parse_rational(text: str) -> Fraction:
    """Exact value of a decimal (``0.2``) or fraction (``3/5``) literal."""
    return Fraction(text.strip())


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class Poly:
    """Polynomial in ``dt`` over Q; ``coeffs[k]`` multiplies ``dt**k``."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable = ()):
        cs = [c if type(c) is Fraction else Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)
        self._hash = None

    @classmethod
    def _raw(cls, coeffs: tuple) -> "Poly":
        # coeffs already trimmed Fractions
        p = object.__new__(cls)
        p.coeffs = coeffs
        p._hash = None
        return p

    @classmethod
    def const(cls, c) -> "Poly":
        return cls((c,))

    # -- structure -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def valuation(self) -> int:
        """Lowest degree with a nonzero coefficient (-1 for the zero polynomial)."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return -1

    def low(self) -> Fraction:
        """Lowest-degree nonzero coefficient (0 for the zero polynomial)."""
        for c in self.coeffs:
            if c:
                return c
        return Fraction(0)

    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def sign(self) -> int:
        c = self.low()
        return (c > 0) - (c < 0)

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    # -- ring operations -------------------------------------------------
    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] += c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly._raw(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly._raw(())
        if len(b) == 1:
            c = b[0]
            return Poly._raw(tuple(x * c for x in a))
        if len(a) == 1:
            c = a[0]
            return Poly._raw(tuple(x * c for x in b))
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return Poly(out)

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if c == 0:
            return Poly._raw(())
        return Poly._raw(tuple(x * c for x in self.coeffs))

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd = other.degree
        lead = other.coeffs[-1]
        if len(rem) - 1 < dd:
            return Poly._raw(()), self
        quot = [Fraction(0)] * (len(rem) - dd)
        for k in range(len(rem) - 1, dd - 1, -1):
            c = rem[k]
            if not c:
                continue
            q = c / lead
            quot[k - dd] = q
            for j, y in enumerate(other.coeffs):
                rem[k - dd + j] -= q * y
        return Poly(quot), Poly(rem)

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self.scale(1 / self.coeffs[-1])

    def gcd(self, other: "Poly") -> "Poly":
        """Monic greatest common divisor (zero only if both are zero)."""
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def __call__(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    # -- misc ------------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(("Poly", self.coeffs))
        return self._hash

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)})"


def _format_term(c: Fraction, k: int) -> str:
    mag = abs(c)
    if k == 0:
        return format_rational(mag)
    mono = "dt" if k == 1 else f"dt^{k}"
    if mag == 1:
        return mono
    return f"{format_rational(mag)}*{mono}"


def format_poly(p: Poly) -> str:
    """Lowest degree first: ``1 - 2*dt + dt^2``."""
    parts: list[str] = []
    for k, c in enumerate(p.coeffs):
        if not c:
            continue
        term = _format_term(c, k)
        if not parts:
            parts.append(term if c > 0 else f"-{term}")
        else:
            parts.append(f"+ {term}" if c > 0 else f"- {term}")
    return " ".join(parts) if parts else "0"


_OPERANDS = (int, Rational, str)  # DtScalar is added once the class exists

_PZERO = Poly._raw(())
_PONE = Poly._raw((Fraction(1),))

Number = Union[int, Fraction, "DtScalar"]


@total_ordering
class DtScalar:
    """Element of Q(dt) in canonical form.

    ``num/den`` with ``gcd(num, den) = 1`` and the lowest-degree nonzero
    coefficient of ``den`` equal to 1.  Immutable and hashable.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=0, den=None):
        if not isinstance(num, Poly):
            num = Poly.const(num)
        if den is None:
            den = _PONE
        elif not isinstance(den, Poly):
            den = Poly.const(den)
        if den.is_zero():
            raise ZeroDivisionError("division by zero scalar")
        self._hash = None
        if num.is_zero():
            self.num, self.den = _PZERO, _PONE
            return
        if not den.is_constant():
            g = num.gcd(den)
            if not g.is_constant():
                num = num.divmod(g)[0]
                den = den.divmod(g)[0]
        c = den.low()
        if c != 1:
            num = num.scale(1 / c)
            den = den.scale(1 / c)
        self.num, self.den = num, den

    @classmethod
    def _canon(cls, num: Poly, den: Poly) -> "DtScalar":
        # caller guarantees canonical form
        s = object.__new__(cls)
        s.num, s.den, s._hash = num, den, None
        return s

    @classmethod
    def poly(cls, coeffs: Sequence) -> "DtScalar":
        return cls._canon(Poly(coeffs), _PONE)

    # -- predicates ------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_rational(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not a rational constant")
        return self.num.low() if self.num.coeffs else Fraction(0)

    # -- field operations ------------------------------------------------
    def __add__(self, other: Number) -> "DtScalar":
        if not isinstance(other, _OPERANDS):
            return NotImplemented
        other = as_scalar(other)
        if self.den is _PONE or self.den == _PONE:
            if other.den == _PONE:
                return DtScalar._canon(self.num + other.num, _PONE)
        if self.den == other.den:
            return DtScalar(self.num + other.num, self.den)
        return DtScalar(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "DtScalar":
        return DtScalar._canon(-self.num, self.den)

    def __pos__(self) -> "DtScalar":
        return self

    def __sub__(self, other: Number) -> "DtScalar":
        if not isinstance(other, _OPERANDS):
            return NotImplemented
        return self + (-as_scalar(other))

    def __rsub__(self, other: Number) -> "DtScalar":
        if not isinstance(other, _OPERANDS):
            return NotImplemented
        return as_scalar(other) + (-self)

    def __mul__(self, other: Number) -> "DtScalar":
        if not isinstance(other, _OPERANDS):
            return NotImplemented
        other = as_scalar(other)
        if self.den == _PONE and other.den == _PONE:
            return DtScalar._canon(self.num * other.num, _PONE)
        return DtScalar(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "DtScalar":
        if self.is_zero():
            raise ZeroDivisionError("division by zero scalar")
        return DtScalar(self.den, self.num)

    def __truediv__(self, other: Number) -> "DtScalar":
        if not isinstance(other, _OPERANDS):
            return NotImplemented
        other = as_scalar(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero scalar")
        if other.is_rational():
            c = other.to_rational()
            return DtScalar._canon(self.num.scale(1 / c), self.den)
        return DtScalar(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other: Number) -> "DtScalar":
        if not isinstance(other, _OPERANDS):
            return NotImplemented
        return as_scalar(other) / self

    def __pow__(self, k: int) -> "DtScalar":
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        for _ in range(k):
            out = out * self
        return out

    # -- order -----------------------------------------------------------
    def sign(self) -> int:
        """Sign for all sufficiently small positive values of dt."""
        return self.num.sign()

    def __abs__(self) -> "DtScalar":
        return -self if self.sign() < 0 else self

    def compare(self, other: Number) -> int:
        return (self - as_scalar(other)).sign()

    def __eq__(self, other) -> bool:
        if isinstance(other, DtScalar):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Rational)):
            return self.is_rational() and self.to_rational() == other
        return NotImplemented

    def __lt__(self, other) -> bool:
        if not isinstance(other, (DtScalar, int, Rational)):
            return NotImplemented
        return self.compare(other) < 0

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.to_rational())
            else:
                self._hash = hash((self.num, self.den))
        return self._hash

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- evaluation ------------------------------------------------------
    def standard_part(self) -> "Fraction | Infinite":
        """Limit as dt -> 0+, or :data:`INFINITE` for unbounded values."""
        if self.is_zero():
            return Fraction(0)
        vn, vd = self.num.valuation, self.den.valuation
        if vn < vd:
            return INFINITE
        if vn > vd:
            return Fraction(0)
        return self.num.low() / self.den.low()

    def is_finite(self) -> bool:
        return self.is_zero() or self.num.valuation >= self.den.valuation

    def eval_at(self, r) -> Fraction:
        """Exact value at ``dt = r``."""
        r = Fraction(r)
        d = self.den(r)
        if d == 0:
            raise PoleError(f"pole at substitution point dt = {format_rational(r)}")
        return self.num(r) / d

    def root_bound(self) -> Fraction:
        """A positive r0 such that the sign is constant on (0, r0).

        Cauchy-type lower bound on the smallest nonzero root modulus of
        ``num * den``.
        """
        q = self.num * self.den
        if q.is_zero():
            return Fraction(1)
        v = q.valuation
        a = abs(q.coeffs[v])
        rest = max((abs(c) for c in q.coeffs[v + 1:]), default=Fraction(0))
        if rest == 0:
            return Fraction(1)
        return a / (a + rest)

    # -- rendering -------------------------------------------------------
    def __str__(self) -> str:
        n = format_poly(self.num)
        if self.den == _PONE:
            return n
        d = format_poly(self.den)
        if len(self.num.coeffs) - self.num.coeffs.count(0) > 1:
            n = f"({n})"
        if len([c for c in self.den.coeffs if c]) > 1 or self.den.coeffs[-1] != 1:
            d = f"({d})"
        return f"{n}/{d}"

    def __repr__(self) -> str:
        return f"DtScalar({self})"


class Infinite:
    """Standard part of an infinite element (sign kept for reporting)."""

    def __repr__(self) -> str:
        return "Infinite"


INFINITE = Infinite()


def as_scalar(x) -> DtScalar:
    if isinstance(x, DtScalar):
        return x
    if isinstance(x, (int, Rational)):
        return DtScalar._canon(Poly.const(Fraction(x)), _PONE)
    if isinstance(x, str):
        return DtScalar(parse_rational(x))
    raise TypeError(f"cannot convert {x!r} to DtScalar")


_OPERANDS = (DtScalar, int, Rational, str)

ZERO = DtScalar(0)
ONE = DtScalar(1)
DT = DtScalar.poly([0, 1])
