"""Exact Gaussian rationals backed by gmpy2.mpq."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq

__all__ = ["Scalar", "ZERO", "ONE", "I", "to_mpq", "format_mpq"]


def to_mpq(x) -> mpq:
    """Coerce an int, Fraction, mpq or ``'p/q'`` string to mpq."""
    if isinstance(x, mpq):
        return x
    if isinstance(x, (int, Rational)):
        return mpq(x.numerator, x.denominator) if isinstance(x, Fraction) else mpq(x)
    if isinstance(x, str):
        return mpq(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def format_mpq(x: mpq) -> str:
    return str(x)


class Scalar:
    """Element of Q(i), stored as a pair of reduced rationals.

    Instances are immutable. Arithmetic never rounds; mixing with ``int``
    and ``Fraction`` operands is supported.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", to_mpq(re))
        object.__setattr__(self, "im", to_mpq(im))

    @classmethod
    def _raw(cls, re: mpq, im: mpq) -> "Scalar":
        s = object.__new__(cls)
        object.__setattr__(s, "re", re)
        object.__setattr__(s, "im", im)
        return s

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    @staticmethod
    def coerce(x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, complex):
            raise TypeError("floating-point complex values are not exact")
        return Scalar(x)

    # -- predicates ---------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    @property
    def is_real(self) -> bool:
        return not self.im

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        return Scalar._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        return Scalar._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return Scalar.coerce(other) - self

    def __neg__(self):
        return Scalar._raw(-self.re, -self.im)

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        # most coefficients in practice are purely real or purely imaginary
        if not b:
            if not d:
                return Scalar._raw(a * c, mpq(0))
            return Scalar._raw(a * c, a * d)
        if not a:
            return Scalar._raw(-b * d, b * c)
        return Scalar._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Scalar.coerce(other)
        n = other.re * other.re + other.im * other.im
        if not n:
            raise ZeroDivisionError("Scalar division by zero")
        return self * Scalar._raw(other.re / n, -other.im / n)

    def __rtruediv__(self, other):
        return Scalar.coerce(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return ONE / (self ** -n)
        out, base = ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> "Scalar":
        return Scalar._raw(self.re, -self.im)

    # -- comparison / hashing -----------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational, type(mpq(0)))):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(Fraction(int(self.re.numerator), int(self.re.denominator)))
        return hash((str(self.re), str(self.im)))

    # -- conversion ---------------------------------------------------------

    def to_fraction(self) -> Fraction:
        if self.im:
            raise ValueError(f"{self} is not real")
        return Fraction(int(self.re.numerator), int(self.re.denominator))

    def to_json(self) -> dict:
        return {"re": format_mpq(self.re), "im": format_mpq(self.im)}

    @classmethod
    def from_json(cls, obj) -> "Scalar":
        if isinstance(obj, dict):
            return cls(obj["re"], obj.get("im", "0"))
        return cls(obj)

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        if not self.im:
            return format_mpq(self.re)
        if not self.re:
            return f"{format_mpq(self.im)}*i"
        sign = "-" if self.im < 0 else "+"
        return f"({format_mpq(self.re)}{sign}{format_mpq(abs(self.im))}*i)"


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)
