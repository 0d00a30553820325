"""Rational functions with adjoined square roots.

An element is ``sum_mask u_mask * prod_{i in mask} sqrt(g_i)`` with ``u_mask``
rational functions.  Radicals are independent; complex conjugation may map one
radical onto another (``sqrt(D) <-> sqrt(conj D)``), declared by ``conj_index``.
"""

from __future__ import annotations

import numpy as np

from .gaussrat import GaussRat
from .poly import UniverseMismatch
from .ratfn import DEFAULT_GUARD, RatFn, RatField


class SqrtField:
    """Q(i)(vars)[sqrt(g_0), ..., sqrt(g_{r-1})]."""

    def __init__(self, vars, radicands, conj_index=None):
        self.vars = tuple(vars)
        self.base = RatField(self.vars)
        self.radicands = tuple(self.base.coerce(g) for g in radicands)
        n = len(self.radicands)
        if conj_index is None:
            conj_index = tuple(range(n))
        self.conj_index = tuple(conj_index)
        for i, j in enumerate(self.conj_index):
            if self.conj_index[j] != i:
                raise ValueError("conj_index must be an involution")
            if self.radicands[i].conj() != self.radicands[j]:
                raise ValueError("conjugation must map radicands onto each other")
        self._empty = (0,) * n

    def __eq__(self, other):
        return (
            isinstance(other, SqrtField)
            and other.vars == self.vars
            and other.radicands == self.radicands
            and other.conj_index == self.conj_index
        )

    def __hash__(self):
        return hash(("SqrtField", self.vars, self.radicands))

    def const(self, c) -> "SqrtExt":
        return SqrtExt(self, {self._empty: self.base.const(c)})

    def one(self) -> "SqrtExt":
        return self.const(1)

    def zero(self) -> "SqrtExt":
        return SqrtExt(self, {})

    def var(self, name: str) -> "SqrtExt":
        return SqrtExt(self, {self._empty: self.base.var(name)})

    def sqrt(self, i: int) -> "SqrtExt":
        mask = tuple(1 if j == i else 0 for j in range(len(self.radicands)))
        return SqrtExt(self, {mask: self.base.one()})

    def coerce(self, x) -> "SqrtExt":
        if isinstance(x, SqrtExt):
            if x.field != self:
                raise UniverseMismatch("element of a different radical extension")
            return x
        return SqrtExt(self, {self._empty: self.base.coerce(x)})

    def parse(self, text: str) -> "SqrtExt":
        return self.coerce(self.base.parse(text))

    def radical_values(self, env):
        """Numeric values of the adjoined roots: principal branch, partners by conjugation."""
        vals = [None] * len(self.radicands)
        for i, g in enumerate(self.radicands):
            j = self.conj_index[i]
            if j < i and vals[j] is not None:
                vals[i] = np.conj(vals[j])
            else:
                vals[i] = np.sqrt(np.asarray(g.evaluate(env), dtype=complex))
        return vals


class SqrtExt:
    __slots__ = ("field", "parts", "_hash")

    def __init__(self, field: SqrtField, parts):
        self.field = field
        self.parts = {m: u for m, u in parts.items() if not u.is_zero()}
        self._hash = None

    @property
    def vars(self):
        return self.field.vars

    def _lift(self, other) -> "SqrtExt":
        return self.field.coerce(other)

    def is_zero(self) -> bool:
        return not self.parts

    def __bool__(self):
        return bool(self.parts)

    def is_constant(self) -> bool:
        if not self.parts:
            return True
        return list(self.parts) == [self.field._empty] and self.parts[self.field._empty].is_constant()

    def constant_value(self) -> GaussRat:
        if not self.parts:
            return GaussRat(0)
        return self.parts[self.field._empty].constant_value()

    def rational_part(self) -> RatFn:
        return self.parts.get(self.field._empty, self.field.base.zero())

    def __add__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        out = dict(self.parts)
        for m, u in other.parts.items():
            out[m] = out[m] + u if m in out else u
        return SqrtExt(self.field, out)

    __radd__ = __add__

    def __neg__(self):
        return SqrtExt(self.field, {m: -u for m, u in self.parts.items()})

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
        rads = self.field.radicands
        out: dict = {}
        for m1, u1 in self.parts.items():
            for m2, u2 in other.parts.items():
                prod = u1 * u2
                for i, (a, b) in enumerate(zip(m1, m2)):
                    if a and b:
                        prod = prod * rads[i]
                m = tuple(a ^ b for a, b in zip(m1, m2))
                out[m] = out[m] + prod if m in out else prod
        return SqrtExt(self.field, out)

    __rmul__ = __mul__

    def flip(self, i: int) -> "SqrtExt":
        """Galois conjugate sending ``sqrt(g_i)`` to ``-sqrt(g_i)``."""
        return SqrtExt(self.field, {m: (-u if m[i] else u) for m, u in self.parts.items()})

    def inverse(self) -> "SqrtExt":
        if not self.parts:
            raise ZeroDivisionError("inverse of zero")
        num = self.field.one()
        cur = self
        for i in range(len(self.field.radicands)):
            c = cur.flip(i)
            num = num * c
            cur = cur * c
        r = cur.rational_part()
        if set(cur.parts) - {self.field._empty}:
            raise ArithmeticError("norm did not reduce to the base field")
        return num * self.field.coerce(r.inverse())

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
        out = self.field.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, SqrtExt):
            return self.field == other.field and self.parts == other.parts
        try:
            return self == self._lift(other)
        except (TypeError, UniverseMismatch):
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.parts.items()))
        return self._hash

    def diff(self, name: str) -> "SqrtExt":
        rads = self.field.radicands
        half_logs = [g.diff(name) / (g * 2) for g in rads]
        out = self.field.zero()
        for m, u in self.parts.items():
            d = u.diff(name)
            for i, bit in enumerate(m):
                if bit and not half_logs[i].is_zero():
                    d = d + u * half_logs[i]
            out = out + SqrtExt(self.field, {m: d})
        return out

    def conj(self) -> "SqrtExt":
        ci = self.field.conj_index
        out = {}
        for m, u in self.parts.items():
            nm = [0] * len(m)
            for i, bit in enumerate(m):
                if bit:
                    nm[ci[i]] = 1
            out[tuple(nm)] = u.conj()
        return SqrtExt(self.field, out)

    def subs(self, name: str, value) -> "SqrtExt":
        for g in self.field.radicands:
            if name in g.variables_used():
                raise ValueError("cannot substitute a variable occurring under a radical")
        return SqrtExt(self.field, {m: u.subs(name, value) for m, u in self.parts.items()})

    def variables_used(self) -> set[str]:
        used = set()
        for m, u in self.parts.items():
            used |= u.variables_used()
            for i, bit in enumerate(m):
                if bit:
                    used |= self.field.radicands[i].variables_used()
        return used

    def evaluate(self, env, guard: float = DEFAULT_GUARD):
        if not self.parts:
            return 0j
        roots = self.field.radical_values(env)
        total = 0j
        for m, u in self.parts.items():
            val = u.evaluate(env, guard)
            for i, bit in enumerate(m):
                if bit:
                    val = val * roots[i]
            total = total + val
        return total

    def __str__(self):
        if not self.parts:
            return "0"
        pieces = []
        for m in sorted(self.parts):
            rad = "*".join(f"sqrt({self.field.radicands[i]})" for i, b in enumerate(m) if b)
            u = self.parts[m]
            pieces.append(f"({u})" + (f"*{rad}" if rad else ""))
        return " + ".join(pieces)

    def __repr__(self):
        return f"SqrtExt({self})"
