"""Exact arithmetic in quadratic fields Q(sqrt(D)).

Only what the chart normalisations need: sqrt(3) for the real planar charts
and sqrt(-3) for the cube roots of unity.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from numbers import Rational


class QuadraticNumber:
    """a + b*sqrt(D) with rational a, b and squarefree integer D."""

    __slots__ = ("a", "b", "D")

    def __init__(self, a, b=0, D: int = -3):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.D = D

    def _coerce(self, other) -> "QuadraticNumber":
        if isinstance(other, QuadraticNumber):
            if other.D != self.D and other.b and self.b:
                raise ValueError(f"mixing Q(sqrt({self.D})) and Q(sqrt({other.D}))")
            return other
        if isinstance(other, (int, Rational)):
            return QuadraticNumber(other, 0, self.D)
        return NotImplemented

    def _field(self, other: "QuadraticNumber") -> int:
        return self.D if self.b or not other.b else other.D

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticNumber(self.a + o.a, self.b + o.b, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.D)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        D = self._field(o)
        return QuadraticNumber(self.a * o.a + D * self.b * o.b, self.a * o.b + self.b * o.a, D)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadraticNumber":
        return QuadraticNumber(self.a, -self.b, self.D)

    def norm(self) -> Fraction:
        return self.a * self.a - self.D * self.b * self.b

    def inverse(self) -> "QuadraticNumber":
        nm = self.norm()
        if not nm:
            raise ZeroDivisionError("division by zero in quadratic field")
        c = self.conjugate()
        return QuadraticNumber(c.a / nm, c.b / nm, self.D)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = QuadraticNumber(1, 0, self.D)
        for _ in range(k):
            out = out * self
        return out

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self) -> int:
        return hash(self.a) if not self.b else hash((self.a, self.b, self.D))

    def is_rational(self) -> bool:
        return not self.b

    def rational(self) -> Fraction:
        if self.b:
            raise ValueError(f"{self} is not rational")
        return self.a

    def __complex__(self) -> complex:
        return complex(float(self.a)) + float(self.b) * cmath.sqrt(self.D)

    def __repr__(self) -> str:
        if not self.b:
            return str(self.a)
        return f"({self.a} + {self.b}*sqrt({self.D}))"


def rho() -> QuadraticNumber:
    """Primitive cube root of unity exp(2 pi i / 3)."""
    return QuadraticNumber(Fraction(-1, 2), Fraction(1, 2), -3)


def as_field(x, D: int = -3) -> QuadraticNumber:
    return x if isinstance(x, QuadraticNumber) else QuadraticNumber(x, 0, D)
