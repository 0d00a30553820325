"""Exact Gaussian rationals.

Rationals are plain :class:`fractions.Fraction`; :class:`GaussRat` pairs two of
them.  Instances are immutable and hashable so they can key dictionaries.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

Rat = Fraction


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"``, an integer or a finite decimal exactly."""
    text = text.strip()
    if not text:
        raise ValueError("empty rational literal")
    return Fraction(text)


class GaussRat:
    """An element ``re + i*im`` of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def coerce(cls, value) -> "GaussRat":
        if isinstance(value, GaussRat):
            return value
        if isinstance(value, (int, Rational)):
            return cls(Fraction(value), 0)
        if isinstance(value, float):
            return cls(Fraction(value), 0)
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        if isinstance(value, str):
            return cls.parse(value)
        raise TypeError(f"cannot interpret {value!r} as a Gaussian rational")

    @classmethod
    def parse(cls, text: str) -> "GaussRat":
        """Parse forms like ``3/10``, ``1/2+1/4i``, ``-i``, ``0.5-0.25j``."""
        s = text.replace(" ", "").replace("(", "").replace(")", "")
        if not s:
            raise ValueError("empty literal")
        if s[-1] not in "ij":
            return cls(parse_rational(s), 0)
        body = s[:-1].rstrip("*")
        # split at the last sign that is not part of an exponent or the leading sign
        cut = None
        for pos in range(len(body) - 1, 0, -1):
            if body[pos] in "+-" and body[pos - 1] not in "eE/":
                cut = pos
                break
        if cut is None:
            real_part, imag_part = "", body
        else:
            real_part, imag_part = body[:cut], body[cut:]
        if imag_part in ("", "+"):
            im = Fraction(1)
        elif imag_part == "-":
            im = Fraction(-1)
        else:
            im = parse_rational(imag_part)
        re_ = parse_rational(real_part) if real_part else Fraction(0)
        return cls(re_, im)

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        if type(other) is not GaussRat:
            try:
                other = GaussRat.coerce(other)
            except TypeError:
                return NotImplemented
        return GaussRat(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is not GaussRat:
            try:
                other = GaussRat.coerce(other)
            except TypeError:
                return NotImplemented
        return GaussRat(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussRat.coerce(other) - self

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if type(other) is not GaussRat:
            try:
                other = GaussRat.coerce(other)
            except TypeError:
                return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussRat(a * c, 0)
        return GaussRat(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if type(other) is not GaussRat:
            try:
                other = GaussRat.coerce(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return GaussRat.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers of Gaussian rationals are exact")
        if n < 0:
            return self.inverse() ** (-n)
        out = GaussRat(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self) -> "GaussRat":
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussRat(self.re / n, -self.im / n)

    def conjugate(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    # comparisons -----------------------------------------------------------
    def __eq__(self, other):
        if type(other) is not GaussRat:
            try:
                other = GaussRat.coerce(other)
            except TypeError:
                return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return not self.im

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def floor_real(self) -> int:
        return self.re.numerator // self.re.denominator

    def __repr__(self):
        return f"GaussRat({self})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{_fmt_im(self.im)}"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{_fmt_im(abs(self.im))}"

    def to_json(self) -> list[str]:
        return [str(self.re), str(self.im)]

    @classmethod
    def from_json(cls, data) -> "GaussRat":
        if isinstance(data, (list, tuple)):
            return cls(parse_rational(str(data[0])), parse_rational(str(data[1])))
        return cls.coerce(data)


def _fmt_im(v: Fraction) -> str:
    if v == 1:
        return "i"
    if v == -1:
        return "-i"
    return f"{v}i" if v.denominator == 1 else f"({v})i"


ZERO = GaussRat(0)
ONE = GaussRat(1)
I = GaussRat(0, 1)
