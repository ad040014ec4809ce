"""Exact arithmetic in Q(sqrt D) for a fixed squarefree D > 1."""
from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering

from ..errors import ValidationError


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def _sign(x: "QuadNum") -> int:
    a, b = x.a, x.b
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return (b > 0) - (b < 0)
    if a > 0 and b > 0:
        return 1
    if a < 0 and b < 0:
        return -1
    # opposite signs: compare a^2 with b^2 D
    lhs, rhs = a * a, b * b * x.D
    if a > 0:
        return 1 if lhs > rhs else -1
    return 1 if rhs > lhs else -1


@total_ordering
class QuadNum:
    """a + b sqrt(D) with rational a, b."""

    __slots__ = ("a", "b", "D")

    def __init__(self, a=0, b=0, D: int = 5):
        if D < 2:
            raise ValidationError("D must be a squarefree integer >= 2")
        self.a = _frac(a)
        self.b = _frac(b)
        self.D = D

    def _coerce(self, other):
        if isinstance(other, QuadNum):
            if other.D != self.D and other.b != 0 and self.b != 0:
                raise ValidationError("mixing different quadratic fields")
            if other.b == 0 and other.D != self.D:
                return QuadNum(other.a, 0, self.D)
            return other
        if isinstance(other, (int, Fraction)):
            return QuadNum(other, 0, self.D)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadNum(self.a + o.a, self.b + o.b, self.D)

    __radd__ = __add__

    def __neg__(self):
        return QuadNum(-self.a, -self.b, self.D)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadNum(self.a - o.a, self.b - o.b, self.D)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadNum(self.a * o.a + self.b * o.b * self.D, self.a * o.b + self.b * o.a, self.D)

    __rmul__ = __mul__

    def conj(self):
        return QuadNum(self.a, -self.b, self.D)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.D

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        num = self * o.conj()
        return QuadNum(num.a / n, num.b / n, self.D)

    def __rtruediv__(self, other):
        return QuadNum(other, 0, self.D) / self

    def __pow__(self, n: int):
        if n < 0:
            return QuadNum(1, 0, self.D) / (self ** (-n))
        out = QuadNum(1, 0, self.D)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def sign(self) -> int:
        return _sign(self)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.D))

    def __lt__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _sign(self - o) < 0

    def __abs__(self):
        return -self if _sign(self) < 0 else self

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __float__(self):
        return float(self.a) + float(self.b) * self.D ** 0.5

    def __repr__(self):
        return f"QuadNum({self.a}, {self.b}, D={self.D})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}√{self.D}"
        sign = "+" if self.b > 0 else "-"
        return f"{self.a}{sign}{abs(self.b)}√{self.D}"

    def to_json(self):
        return str(self)

    def floor_bounds(self):
        """Rational interval [lo, hi] containing the value (for display/bounds only)."""
        from math import isqrt

        scale = 10 ** 12
        r_lo = Fraction(isqrt(self.D * scale * scale), scale)
        r_hi = r_lo + Fraction(1, scale)
        if self.b >= 0:
            return self.a + self.b * r_lo, self.a + self.b * r_hi
        return self.a + self.b * r_hi, self.a + self.b * r_lo


_TERM = re.compile(r"^\s*([+-]?\s*[0-9]+(?:/[0-9]+)?)?\s*(?:([+-])\s*([0-9]+(?:/[0-9]+)?)?\s*\*?\s*√\s*([0-9]+))?\s*$")


def parse_quad(text, D: int | None = None) -> QuadNum:
    """Parse "p/q" or "p/q+r/s√D" (also "r/s√D" and "-√D")."""
    if isinstance(text, (int, Fraction)):
        return QuadNum(text, 0, D or 5)
    s = str(text).replace("sqrt", "√").replace(" ", "")
    if "√" not in s:
        return QuadNum(Fraction(s), 0, D or 5)
    head, _, tail = s.partition("√")
    dd = int(tail)
    if D is not None and dd != D:
        raise ValidationError(f"field mismatch: √{dd} in a rule over √{D}")
    # split head into rational part and coefficient of the root
    m = re.match(r"^([+-]?[0-9]+(?:/[0-9]+)?)?([+-])?([0-9]+(?:/[0-9]+)?)?\*?$", head)
    if m is None:
        raise ValidationError(f"cannot parse quadratic number {text!r}")
    first, sign, coef = m.groups()
    if sign is None:
        # only a coefficient, e.g. "3/2√5" or "-√5"
        if first is None:
            return QuadNum(0, 1, dd)
        if first in ("+", "-"):
            return QuadNum(0, -1 if first == "-" else 1, dd)
        return QuadNum(0, Fraction(first), dd)
    a = Fraction(first) if first is not None else Fraction(0)
    b = Fraction(coef) if coef is not None else Fraction(1)
    if sign == "-":
        b = -b
    return QuadNum(a, b, dd)


def golden(D: int = 5) -> QuadNum:
    """phi = (1 + sqrt 5) / 2."""
    return QuadNum(Fraction(1, 2), Fraction(1, 2), 5)
