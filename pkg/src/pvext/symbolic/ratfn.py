"""Rational functions over Q(i) and the field descriptor used by expressions.

Reduction to lowest terms delegates the multivariate gcd to sympy's sparse
polynomial rings; everything else stays in :class:`Poly`.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

from .gaussrat import GaussRat, ONE
from .poly import Poly, UniverseMismatch

DEFAULT_GUARD = 1e-12


class SingularityError(ArithmeticError):
    """Numeric evaluation hit (or came within the guard of) a pole or a zero of a carrier."""


@lru_cache(maxsize=64)
def _sympy_ring(vars: tuple, gaussian: bool):
    from sympy.polys.domains import QQ, QQ_I
    from sympy.polys.rings import ring

    dom = QQ_I if gaussian else QQ
    R = ring(",".join(f"x{i}" for i in range(len(vars))), dom)[0]
    return R, dom


def _to_ring(p: Poly, R, dom, gaussian: bool):
    from sympy.polys.domains import QQ

    data = {}
    for e, c in p.terms.items():
        re_ = QQ(c.re.numerator, c.re.denominator)
        if gaussian:
            data[e] = dom(re_, QQ(c.im.numerator, c.im.denominator))
        else:
            data[e] = re_
    return R.from_dict(data)


def _mpq(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def _from_ring(rp, vars, gaussian: bool) -> Poly:
    terms = {}
    for e, c in rp.to_dict().items():
        if gaussian:
            terms[e] = GaussRat(_mpq(c.x), _mpq(c.y))
        else:
            terms[e] = GaussRat(_mpq(c), 0)
    return Poly(vars, terms)


def _monomial_gcd(a: Poly, b: Poly) -> tuple:
    exps = list(a.terms) + list(b.terms)
    return tuple(min(col) for col in zip(*exps))


def _divide_monomial(p: Poly, g: tuple) -> Poly:
    return Poly._raw(p.vars, {tuple(x - y for x, y in zip(e, g)): c for e, c in p.terms.items()})


class RatFn:
    """Reduced quotient ``num/den`` with a monic denominator (lexicographic leading term)."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Poly | None = None, *, reduce: bool = True):
        if den is None:
            den = Poly.const(num.vars, 1)
        if num.vars != den.vars:
            raise UniverseMismatch("numerator and denominator universes differ")
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if reduce:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @property
    def vars(self):
        return self.num.vars

    @classmethod
    def from_poly(cls, p: Poly) -> "RatFn":
        return cls(p, Poly.const(p.vars, 1), reduce=False)

    @classmethod
    def const(cls, vars, c) -> "RatFn":
        return cls.from_poly(Poly.const(vars, c))

    def _lift(self, other) -> "RatFn":
        if isinstance(other, RatFn):
            if other.vars != self.vars:
                raise UniverseMismatch(f"variable universes differ: {self.vars} vs {other.vars}")
            return other
        if isinstance(other, Poly):
            if other.vars != self.vars:
                raise UniverseMismatch(f"variable universes differ: {self.vars} vs {other.vars}")
            return RatFn.from_poly(other)
        return RatFn.const(self.vars, other)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.is_constant()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> GaussRat:
        return self.num.constant_value() / self.den.constant_value()

    def __add__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            return RatFn(self.num + other.num, self.den)
        return RatFn(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFn(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return RatFn.const(self.vars, 0)
        if other.is_constant():
            c = other.constant_value()
            return RatFn(self.num * c, self.den, reduce=False)
        if self.is_constant():
            c = self.constant_value()
            return RatFn(other.num * c, other.den, reduce=False)
        return RatFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFn":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of the zero rational function")
        return RatFn(self.den, self.num)

    def __truediv__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("integer powers only")
        if n < 0:
            return self.inverse() ** (-n)
        return RatFn(self.num ** n, self.den ** n, reduce=False)

    def __eq__(self, other):
        if isinstance(other, RatFn):
            return self.vars == other.vars and self.num == other.num and self.den == other.den
        if isinstance(other, (Poly, int, Fraction, GaussRat)):
            try:
                return self == self._lift(other)
            except UniverseMismatch:
                return False
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def diff(self, name: str) -> "RatFn":
        dn = self.num.diff(name)
        dd = self.den.diff(name)
        if dd.is_zero():
            return RatFn(dn, self.den)
        return RatFn(dn * self.den - self.num * dd, self.den * self.den)

    def conj(self) -> "RatFn":
        return RatFn(self.num.conj(), self.den.conj())

    def subs(self, name: str, value) -> "RatFn":
        return RatFn(self.num.subs(name, value), self.den.subs(name, value))

    def shift(self, name: str, amount) -> "RatFn":
        return RatFn(self.num.shift(name, amount), self.den.shift(name, amount))

    def variables_used(self) -> set[str]:
        return self.num.variables_used() | self.den.variables_used()

    def evaluate(self, env, guard: float = DEFAULT_GUARD):
        num = self.num.evaluate(env)
        if self.den.is_constant():
            return num / complex(self.den.constant_value())
        den = self.den.evaluate(env)
        if np.any(np.abs(den) < guard):
            raise SingularityError(f"denominator {self.den} below guard {guard}")
        return num / den

    def __str__(self):
        if self.den == 1:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RatFn({self})"

    def to_json(self):
        return {"num": self.num.to_json(), "den": self.den.to_json()}


def _normalize(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    vars = num.vars
    if num.is_zero():
        return num, Poly.const(vars, 1)
    if den.is_constant():
        c = den.constant_value()
        return (num if c == ONE else num / c), Poly.const(vars, 1)
    g = _monomial_gcd(num, den)
    if any(g):
        num = _divide_monomial(num, g)
        den = _divide_monomial(den, g)
    if not den.is_monomial() and not num.is_constant():
        gaussian = any(c.im for c in num.terms.values()) or any(c.im for c in den.terms.values())
        R, dom = _sympy_ring(vars, gaussian)
        a, b = _to_ring(num, R, dom, gaussian).cancel(_to_ring(den, R, dom, gaussian))
        num = _from_ring(a, vars, gaussian)
        den = _from_ring(b, vars, gaussian)
    _, lc = den.leading()
    if lc != ONE:
        inv = lc.inverse()
        num = num * inv
        den = den * inv
    return num, den


class RatField:
    """Field of rational functions over a declared variable tuple."""

    def __init__(self, vars):
        self.vars = tuple(vars)

    def __eq__(self, other):
        return isinstance(other, RatField) and other.vars == self.vars

    def __hash__(self):
        return hash(("RatField", self.vars))

    def one(self) -> RatFn:
        return RatFn.const(self.vars, 1)

    def zero(self) -> RatFn:
        return RatFn.const(self.vars, 0)

    def const(self, c) -> RatFn:
        return RatFn.const(self.vars, c)

    def var(self, name: str) -> RatFn:
        return RatFn.from_poly(Poly.var(self.vars, name))

    def coerce(self, x) -> RatFn:
        if isinstance(x, RatFn):
            if x.vars != self.vars:
                raise UniverseMismatch("element from a different universe")
            return x
        if isinstance(x, Poly):
            if x.vars != self.vars:
                raise UniverseMismatch("polynomial from a different universe")
            return RatFn.from_poly(x)
        return self.const(x)

    def parse(self, text: str) -> RatFn:
        return RatFn.from_poly(Poly.parse(text, self.vars))
