"""Sparse multivariate polynomials with exact Gaussian-rational coefficients."""

from __future__ import annotations

import ast
import re
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .gaussrat import GaussRat, ONE, ZERO

LAMBDA = "lam"

_HOLO_RE = re.compile(r"^([a-z])(\d*)$")
_BAR_RE = re.compile(r"^([a-z])b(\d*)$")


class UniverseMismatch(ValueError):
    """Raised when two objects live over different declared variable sets."""


def conj_name(name: str) -> str:
    """Name of the conjugate coordinate: ``z1 <-> zb1``; ``lam`` is formal and self-conjugate."""
    if name == LAMBDA:
        return name
    m = _BAR_RE.match(name)
    if m:
        return m.group(1) + m.group(2)
    m = _HOLO_RE.match(name)
    if m:
        return m.group(1) + "b" + m.group(2)
    raise ValueError(f"variable {name!r} has no conjugate partner")


def is_bar(name: str) -> bool:
    return name != LAMBDA and bool(_BAR_RE.match(name))


def universe(*holo: str, lam: bool = True) -> tuple[str, ...]:
    """Declared variable tuple: holomorphic names, their conjugates, then ``lam``."""
    names = list(holo) + [conj_name(h) for h in holo]
    if lam:
        names.append(LAMBDA)
    return tuple(names)


class Poly:
    """Polynomial over Q(i) in a fixed, declared tuple of variables.

    ``terms`` maps exponent tuples (aligned with ``vars``) to nonzero
    :class:`GaussRat` coefficients.
    """

    __slots__ = ("vars", "terms", "_index", "_compiled")

    def __init__(self, vars: Iterable[str], terms: Mapping[tuple, object] | None = None):
        self.vars = tuple(vars)
        clean = {}
        if terms:
            n = len(self.vars)
            for exps, c in terms.items():
                c = GaussRat.coerce(c)
                if c:
                    exps = tuple(exps)
                    if len(exps) != n:
                        raise ValueError("exponent length does not match variables")
                    clean[exps] = c
        self.terms = clean
        self._index = None
        self._compiled = None

    @classmethod
    def _raw(cls, vars, terms):
        p = cls.__new__(cls)
        p.vars = vars
        p.terms = terms
        p._index = None
        p._compiled = None
        return p

    # constructors -----------------------------------------------------------
    @classmethod
    def zero(cls, vars) -> "Poly":
        return cls._raw(tuple(vars), {})

    @classmethod
    def const(cls, vars, c) -> "Poly":
        vars = tuple(vars)
        c = GaussRat.coerce(c)
        return cls._raw(vars, {(0,) * len(vars): c} if c else {})

    @classmethod
    def var(cls, vars, name: str) -> "Poly":
        vars = tuple(vars)
        if name not in vars:
            raise UniverseMismatch(f"{name!r} is not a declared variable of {vars}")
        exps = tuple(1 if v == name else 0 for v in vars)
        return cls._raw(vars, {exps: ONE})

    @classmethod
    def monomial(cls, vars, powers: Mapping[str, int], c=1) -> "Poly":
        vars = tuple(vars)
        for name in powers:
            if name not in vars:
                raise UniverseMismatch(f"{name!r} is not a declared variable of {vars}")
        exps = tuple(powers.get(v, 0) for v in vars)
        return cls(vars, {exps: c})

    @classmethod
    def parse(cls, text: str, vars) -> "Poly":
        """Parse a Python-syntax polynomial, e.g. ``"z1**2 + z2**2"`` or ``"(1/2+1j)*z"``."""
        vars = tuple(vars)
        tree = ast.parse(text.replace("^", "**"), mode="eval")
        return _from_ast(tree.body, vars)

    # basic queries ------------------------------------------------------------
    def index(self, name: str) -> int:
        if self._index is None:
            self._index = {v: i for i, v in enumerate(self.vars)}
        try:
            return self._index[name]
        except KeyError:
            raise UniverseMismatch(f"{name!r} is not a declared variable of {self.vars}") from None

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> GaussRat:
        return self.terms.get((0,) * len(self.vars), ZERO)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def degree(self, name: str | None = None) -> int:
        if not self.terms:
            return -1
        if name is None:
            return max(sum(e) for e in self.terms)
        i = self.index(name)
        return max(e[i] for e in self.terms)

    def variables_used(self) -> set[str]:
        used = set()
        for exps in self.terms:
            for v, e in zip(self.vars, exps):
                if e:
                    used.add(v)
        return used

    def leading(self) -> tuple[tuple, GaussRat]:
        """Leading term in lexicographic order of exponent tuples."""
        exps = max(self.terms)
        return exps, self.terms[exps]

    def _check(self, other: "Poly"):
        if self.vars != other.vars:
            raise UniverseMismatch(f"variable universes differ: {self.vars} vs {other.vars}")

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.const(self.vars, other)

    # arithmetic ------------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, (Poly, int, Fraction, GaussRat, complex, float)):
            return NotImplemented
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Poly._raw(self.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, (Poly, int, Fraction, GaussRat, complex, float)):
            return NotImplemented
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if isinstance(other, Poly):
            self._check(other)
            if not self.terms or not other.terms:
                return Poly._raw(self.vars, {})
            out: dict = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    s = out.get(e)
                    out[e] = c1 * c2 if s is None else s + c1 * c2
            return Poly._raw(self.vars, {e: c for e, c in out.items() if c})
        if isinstance(other, (int, Fraction, GaussRat, complex, float)):
            c = GaussRat.coerce(other)
            if not c:
                return Poly._raw(self.vars, {})
            return Poly._raw(self.vars, {e: v * c for e, v in self.terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, GaussRat, complex, float)):
            return self * GaussRat.coerce(other).inverse()
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        out = Poly.const(self.vars, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.vars == other.vars and self.terms == other.terms
        if isinstance(other, (int, Fraction, GaussRat, complex, float)):
            return self.terms == Poly.const(self.vars, other).terms
        return NotImplemented

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    # calculus and substitution -------------------------------------------------
    def diff(self, name: str) -> "Poly":
        i = self.index(name)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[ne] = c * k
        return Poly._raw(self.vars, out)

    def subs(self, name: str, value) -> "Poly":
        """Substitute a constant or a polynomial (same universe) for one variable."""
        i = self.index(name)
        if isinstance(value, Poly):
            self._check(value)
            sub = value
        else:
            sub = Poly.const(self.vars, value)
        by_power: dict[int, dict] = {}
        for e, c in self.terms.items():
            by_power.setdefault(e[i], {})[e[:i] + (0,) + e[i + 1:]] = c
        out = Poly.zero(self.vars)
        powers = {0: Poly.const(self.vars, 1)}
        for k in sorted(by_power):
            if k not in powers:
                powers[k] = sub ** k
            out = out + Poly._raw(self.vars, by_power[k]) * powers[k]
        return out

    def shift(self, name: str, amount) -> "Poly":
        """``p(name + amount)``."""
        return self.subs(name, Poly.var(self.vars, name) + amount)

    def compose(self, mapping: Mapping[str, "Poly"], target_vars) -> "Poly":
        """Substitute every variable of ``self`` by a polynomial over ``target_vars``."""
        target_vars = tuple(target_vars)
        images = []
        for v in self.vars:
            if v in mapping:
                img = mapping[v]
                if img.vars != target_vars:
                    raise UniverseMismatch("substituted polynomials must share the target universe")
            elif v in target_vars:
                img = Poly.var(target_vars, v)
            else:
                img = None
            images.append(img)
        cache: dict = {}
        out = Poly.zero(target_vars)
        for e, c in self.terms.items():
            term = Poly.const(target_vars, c)
            for i, k in enumerate(e):
                if not k:
                    continue
                if images[i] is None:
                    raise UniverseMismatch(f"no image for variable {self.vars[i]!r}")
                key = (i, k)
                if key not in cache:
                    cache[key] = images[i] ** k
                term = term * cache[key]
            out = out + term
        return out

    def reuniverse(self, new_vars) -> "Poly":
        """Re-express over another variable tuple; used variables must survive."""
        new_vars = tuple(new_vars)
        pos = {v: i for i, v in enumerate(new_vars)}
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(new_vars)
            for v, k in zip(self.vars, e):
                if k:
                    if v not in pos:
                        raise UniverseMismatch(f"variable {v!r} is used but absent from {new_vars}")
                    ne[pos[v]] = k
            out[tuple(ne)] = c
        return Poly._raw(new_vars, out)

    def conj(self) -> "Poly":
        """Complex conjugate: swaps ``z <-> zb`` and conjugates coefficients."""
        perm = [self.index(conj_name(v)) if v != LAMBDA else self.index(v) for v in self.vars]
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(e)
            for i, k in enumerate(e):
                ne[perm[i]] = k
            out[tuple(ne)] = c.conjugate()
        return Poly._raw(self.vars, out)

    def map_coefficients(self, fn) -> "Poly":
        return Poly(self.vars, {e: fn(c) for e, c in self.terms.items()})

    # numerics --------------------------------------------------------------------
    def _compile(self):
        if self._compiled is None:
            exps = np.array(list(self.terms.keys()), dtype=np.int64).reshape(len(self.terms), len(self.vars))
            coefs = np.array([complex(c) for c in self.terms.values()], dtype=complex)
            self._compiled = (exps, coefs)
        return self._compiled

    def evaluate(self, env: Mapping[str, object]):
        """Evaluate numerically; ``env`` maps variable names to scalars or broadcastable arrays."""
        if not self.terms:
            return 0j
        exps, coefs = self._compile()
        used = [i for i in range(len(self.vars)) if exps[:, i].any()]
        cache: dict = {}
        total = 0j
        for row, c in zip(exps, coefs):
            val = c
            for i in used:
                k = int(row[i])
                if k:
                    key = (i, k)
                    if key not in cache:
                        name = self.vars[i]
                        if name not in env:
                            raise KeyError(f"no value supplied for variable {name!r}")
                        base = env[name]
                        cache[key] = base ** k if k > 1 else base
                    val = val * cache[key]
            total = total + val
        return total

    def evaluate_exact(self, point: Mapping[str, object]) -> GaussRat:
        total = ZERO
        for e, c in self.terms.items():
            val = c
            for v, k in zip(self.vars, e):
                if k:
                    val = val * GaussRat.coerce(point[v]) ** k
            total = total + val
        return total

    # display / io ---------------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                (v if k == 1 else f"{v}^{k}") for v, k in zip(self.vars, e) if k
            )
            if not mono:
                parts.append(f"({c})" if c.im and c.re else str(c))
            elif c == ONE:
                parts.append(mono)
            elif c == -ONE:
                parts.append("-" + mono)
            else:
                cs = f"({c})" if (c.im and c.re) or (c.re.denominator != 1 and c.im) else str(c)
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Poly({self})"

    def to_json(self) -> list:
        return [[list(e), c.to_json()] for e, c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, vars, data) -> "Poly":
        return cls(vars, {tuple(e): GaussRat.from_json(c) for e, c in data})


def _from_ast(node, vars) -> Poly:
    if isinstance(node, ast.BinOp):
        left = _from_ast(node.left, vars)
        if isinstance(node.op, ast.Pow):
            exp = node.right
            if isinstance(exp, ast.UnaryOp) or not isinstance(exp, ast.Constant) or not isinstance(exp.value, int):
                raise ValueError("only non-negative integer exponents are allowed")
            return left ** exp.value
        right = _from_ast(node.right, vars)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            if not right.is_constant() or right.is_zero():
                raise ValueError("division only by nonzero constants")
            return left / right.constant_value()
        raise ValueError(f"unsupported operator {type(node.op).__name__}")
    if isinstance(node, ast.UnaryOp):
        inner = _from_ast(node.operand, vars)
        if isinstance(node.op, ast.USub):
            return -inner
        if isinstance(node.op, ast.UAdd):
            return inner
        raise ValueError("unsupported unary operator")
    if isinstance(node, ast.Constant):
        v = node.value
        if isinstance(v, bool):
            raise ValueError("booleans are not coefficients")
        if isinstance(v, float):
            v = Fraction(repr(v))
        elif isinstance(v, complex):
            v = GaussRat(Fraction(repr(v.real)), Fraction(repr(v.imag)))
        return Poly.const(vars, v)
    if isinstance(node, ast.Name):
        if node.id in ("I", "i") and node.id not in vars:
            return Poly.const(vars, GaussRat(0, 1))
        return Poly.var(vars, node.id)
    raise ValueError(f"unsupported syntax in polynomial: {ast.dump(node)}")
