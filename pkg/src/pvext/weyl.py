"""Differential operators with polynomial coefficients, Bernstein data and the catalog."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb
from typing import Mapping

import numpy as np

from .conventions import CATALOG_VERSION, SINGULARITY_GUARD
from .symbolic import (
    LAMBDA,
    Poly,
    PowerLogExpr,
    RatField,
    UniverseMismatch,
    conj_name,
    is_bar,
    universe,
)


def _binom_multi(alpha, gamma) -> int:
    out = 1
    for a, g in zip(alpha, gamma):
        out *= comb(a, g)
    return out


def _sub_indices(alpha):
    return product(*(range(a + 1) for a in alpha))


class DiffOperator:
    """``sum_alpha c_alpha * d^alpha`` with coefficients to the left.

    ``dvars`` are the differentiation variables (all holomorphic or all
    anti-holomorphic); coefficients are :class:`Poly` over ``vars`` and may
    involve ``lam``.
    """

    __slots__ = ("vars", "dvars", "side", "terms")

    def __init__(self, vars, dvars, terms: Mapping[tuple, Poly] | None = None, side: str | None = None):
        self.vars = tuple(vars)
        self.dvars = tuple(dvars)
        for v in self.dvars:
            if v not in self.vars:
                raise UniverseMismatch(f"differentiation variable {v!r} not in {self.vars}")
        sides = {("anti" if is_bar(v) else "holo") for v in self.dvars}
        if len(sides) > 1:
            raise ValueError("an operator differentiates on one side only")
        inferred = sides.pop() if sides else "holo"
        if side is not None and side != inferred:
            raise ValueError(f"declared side {side!r} does not match variables {self.dvars}")
        self.side = inferred
        clean = {}
        for alpha, c in (terms or {}).items():
            if not isinstance(c, Poly):
                c = Poly.const(self.vars, c)
            if c.vars != self.vars:
                raise UniverseMismatch("coefficient universe mismatch")
            if len(alpha) != len(self.dvars):
                raise ValueError("multi-index length does not match dvars")
            if not c.is_zero():
                clean[tuple(alpha)] = c
        self.terms = clean

    # constructors ----------------------------------------------------------------
    @classmethod
    def identity(cls, vars, dvars) -> "DiffOperator":
        return cls(vars, dvars, {(0,) * len(tuple(dvars)): Poly.const(vars, 1)})

    @classmethod
    def zero(cls, vars, dvars) -> "DiffOperator":
        return cls(vars, dvars, {})

    @classmethod
    def partial(cls, vars, dvars, name: str, order: int = 1, coeff=1) -> "DiffOperator":
        dvars = tuple(dvars)
        alpha = tuple(order if v == name else 0 for v in dvars)
        if name not in dvars:
            raise UniverseMismatch(f"{name!r} is not a differentiation variable")
        c = coeff if isinstance(coeff, Poly) else Poly.const(vars, coeff)
        return cls(vars, dvars, {alpha: c})

    @classmethod
    def multiplication(cls, vars, dvars, c) -> "DiffOperator":
        c = c if isinstance(c, Poly) else Poly.const(vars, c)
        return cls(vars, dvars, {(0,) * len(tuple(dvars)): c})

    def _same(self, other: "DiffOperator"):
        if self.vars != other.vars or self.dvars != other.dvars:
            raise UniverseMismatch("operators over different universes")

    def _wrap(self, terms) -> "DiffOperator":
        op = DiffOperator.__new__(DiffOperator)
        op.vars, op.dvars, op.side = self.vars, self.dvars, self.side
        op.terms = {a: c for a, c in terms.items() if not c.is_zero()}
        return op

    def is_zero(self) -> bool:
        return not self.terms

    def order(self) -> int:
        return max((sum(a) for a in self.terms), default=-1)

    # algebra -------------------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, DiffOperator):
            other = DiffOperator.multiplication(self.vars, self.dvars, other)
        self._same(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out[a] + c if a in out else c
        return self._wrap(out)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap({a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, DiffOperator):
            other = DiffOperator.multiplication(self.vars, self.dvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "DiffOperator":
        c = c if isinstance(c, Poly) else Poly.const(self.vars, c)
        return self._wrap({a: c * v for a, v in self.terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def __matmul__(self, other: "DiffOperator") -> "DiffOperator":
        return self.compose(other)

    def __mul__(self, other):
        if isinstance(other, DiffOperator):
            return self.compose(other)
        return self.scale(other)

    def compose(self, other: "DiffOperator") -> "DiffOperator":
        """``self o other`` normal ordered by the Leibniz rule."""
        self._same(other)
        out: dict = {}
        dcache: dict = {}
        for alpha, c in self.terms.items():
            for beta, d in other.terms.items():
                for gamma in _sub_indices(alpha):
                    key = (beta, gamma)
                    if key not in dcache:
                        dcache[key] = _diff_multi(d, self.dvars, gamma)
                    dg = dcache[key]
                    if dg.is_zero():
                        continue
                    coef = c * dg * _binom_multi(alpha, gamma)
                    idx = tuple(a - g + b for a, g, b in zip(alpha, gamma, beta))
                    out[idx] = out[idx] + coef if idx in out else coef
        return self._wrap(out)

    def adjoint(self) -> "DiffOperator":
        """Formal adjoint ``sum (-1)^|alpha| d^alpha o c_alpha``."""
        out: dict = {}
        for alpha, c in self.terms.items():
            sign = -1 if sum(alpha) % 2 else 1
            for gamma in _sub_indices(alpha):
                dc = _diff_multi(c, self.dvars, gamma)
                if dc.is_zero():
                    continue
                coef = dc * (sign * _binom_multi(alpha, gamma))
                idx = tuple(a - g for a, g in zip(alpha, gamma))
                out[idx] = out[idx] + coef if idx in out else coef
        return self._wrap(out)

    def shift_lambda(self, j) -> "DiffOperator":
        return self._wrap({a: c.shift(LAMBDA, j) if LAMBDA in c.vars else c for a, c in self.terms.items()})

    def subs_lambda(self, value) -> "DiffOperator":
        return self._wrap({a: c.subs(LAMBDA, value) if LAMBDA in c.vars else c for a, c in self.terms.items()})

    def conjugate(self) -> "DiffOperator":
        """Mirror onto the other side: ``z -> zb``, ``d -> dbar``, conjugated coefficients."""
        op = DiffOperator.__new__(DiffOperator)
        op.vars = self.vars
        op.dvars = tuple(conj_name(v) for v in self.dvars)
        op.side = "anti" if self.side == "holo" else "holo"
        op.terms = {a: c.conj() for a, c in self.terms.items()}
        return op

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return self.vars == other.vars and self.dvars == other.dvars and self.terms == other.terms

    __hash__ = None

    # application -----------------------------------------------------------------
    def apply(self, e: PowerLogExpr) -> PowerLogExpr:
        """Apply to a power/log expression; derivative chains are shared between terms."""
        if e.field.vars != self.vars:
            raise UniverseMismatch("operator and expression universes differ")
        cache = {(0,) * len(self.dvars): e}

        def deriv(alpha):
            if alpha in cache:
                return cache[alpha]
            i = next(k for k, a in enumerate(alpha) if a)
            prev = alpha[:i] + (alpha[i] - 1,) + alpha[i + 1:]
            cache[alpha] = deriv(prev).diff(self.dvars[i])
            return cache[alpha]

        out = PowerLogExpr.zero(e.field)
        for alpha in sorted(self.terms):
            out = out + deriv(alpha).scale(e.field.coerce(self.terms[alpha]))
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for a in sorted(self.terms, reverse=True):
            d = "*".join(
                (f"d[{v}]" if k == 1 else f"d[{v}]^{k}") for v, k in zip(self.dvars, a) if k
            )
            c = self.terms[a]
            cs = str(c)
            if d:
                parts.append(d if cs == "1" else f"({cs})*{d}")
            else:
                parts.append(f"({cs})")
        return " + ".join(parts)

    def __repr__(self):
        return f"DiffOperator({self})"

    def to_json(self) -> list:
        return [[self.terms[a].to_json(), list(a)] for a in sorted(self.terms)]

    @classmethod
    def from_json(cls, vars, dvars, data) -> "DiffOperator":
        return cls(vars, dvars, {tuple(a): Poly.from_json(vars, c) for c, a in data})


def _diff_multi(p: Poly, dvars, alpha) -> Poly:
    for v, k in zip(dvars, alpha):
        for _ in range(k):
            p = p.diff(v)
            if p.is_zero():
                return p
    return p


def apply_op(P: DiffOperator, e: PowerLogExpr) -> PowerLogExpr:
    return P.apply(e)


def adjoint(P: DiffOperator) -> DiffOperator:
    return P.adjoint()


def conjugate_op(P: DiffOperator) -> DiffOperator:
    if P.side != "holo":
        raise ValueError("conjugate_op expects a holomorphic operator")
    return P.conjugate()


# --------------------------------------------------------------------------------------
# Bernstein data


@dataclass
class Certificate:
    name: str
    passed: bool
    residual: str = "0"
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"check": self.name, "status": "pass" if self.passed else "fail",
                "residual": self.residual, **self.details}


@dataclass
class BernsteinDatum:
    """``P f^(lam+1) = b(lam) f^lam`` with ``b`` stored by its roots."""

    name: str
    holo: tuple
    f: Poly
    b_roots: list  # (root as Fraction, multiplicity)
    P: DiffOperator
    factors: list | None = None  # separable factorization metadata (product cases)

    @property
    def vars(self):
        return self.f.vars

    @property
    def d(self) -> int:
        return len(self.holo)

    @property
    def field(self) -> RatField:
        return RatField(self.vars)

    def b(self) -> Poly:
        out = Poly.const(self.vars, 1)
        lam = Poly.var(self.vars, LAMBDA)
        for r, m in self.b_roots:
            out = out * (lam - r) ** m
        return out

    def power(self, shift=0, conj_side: bool = False) -> PowerLogExpr:
        """``f^(lam+shift)`` (or ``conj(f)^(lam+shift)``) as an expression."""
        F = self.field
        f = F.coerce(self.f)
        if conj_side:
            return PowerLogExpr.power(F, f, 0, shift, holo_lam=0, anti_lam=1)
        return PowerLogExpr.power(F, f, shift, 0, holo_lam=1, anti_lam=0)

    def roots_rational_negative(self) -> bool:
        return all(Fraction(r) < 0 for r, _ in self.b_roots)

    def to_json(self) -> dict:
        return {
            "version": CATALOG_VERSION,
            "name": self.name,
            "variables": list(self.vars),
            "holomorphic": list(self.holo),
            "f": self.f.to_json(),
            "b_factored": [[r.numerator, r.denominator, m] for r, m in self.b_roots],
            "P": self.P.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "BernsteinDatum":
        vars = tuple(data["variables"])
        holo = tuple(data["holomorphic"])
        f = Poly.from_json(vars, data["f"])
        roots = [(Fraction(n, d), int(m)) for n, d, m in data["b_factored"]]
        P = DiffOperator.from_json(vars, holo, data["P"])
        return cls(data["name"], holo, f, roots, P)


def verify_bernstein(d: BernsteinDatum) -> Certificate:
    F = d.field
    lhs = d.P.apply(d.power(1))
    rhs = d.power(0).scale(F.coerce(d.b()))
    residual = lhs - rhs
    return Certificate(
        f"bernstein[{d.name}]",
        residual.is_zero(),
        str(residual),
        {"b": str(d.b()), "P": str(d.P), "roots_negative_rational": d.roots_rational_negative()},
    )


def iterate_bernstein(d: BernsteinDatum, M: int) -> tuple[DiffOperator, Poly]:
    """``P_M = P(lam) o P(lam+1) o ... o P(lam+M-1)`` and ``B_M = prod b(lam+j)``."""
    if M < 0:
        raise ValueError("M must be non-negative")
    P_M = DiffOperator.identity(d.vars, d.holo)
    B_M = Poly.const(d.vars, 1)
    b = d.b()
    for j in range(M):
        P_M = P_M.compose(d.P.shift_lambda(j))
        B_M = B_M * b.shift(LAMBDA, j)
    return P_M, B_M


def certify_iterate(d: BernsteinDatum, M: int) -> Certificate:
    P_M, B_M = iterate_bernstein(d, M)
    residual = P_M.apply(d.power(M)) - d.power(0).scale(d.field.coerce(B_M))
    return Certificate(f"iterate[{d.name}, M={M}]", residual.is_zero(), str(residual),
                       {"B_M": str(B_M), "order": P_M.order()})


def certify_conjugate(d: BernsteinDatum, M: int = 1) -> Certificate:
    """Conjugate functional equation ``conj(P_M) conj(f)^(lam+M) = B_M conj(f)^lam``.

    ``lam`` is treated as real, so ``B_M`` is conjugated coefficient-wise.
    """
    P_M, B_M = iterate_bernstein(d, M)
    Q = conjugate_op(P_M)
    residual = Q.apply(d.power(M, conj_side=True)) - d.power(0, conj_side=True).scale(d.field.coerce(B_M.conj()))
    return Certificate(f"conjugate[{d.name}, M={M}]", residual.is_zero(), str(residual))


def numeric_bernstein_check(d: BernsteinDatum, rng: np.random.Generator, n: int = 20) -> float:
    """Max relative error of both sides of the functional equation at random points."""
    lhs_e = d.P.apply(d.power(1))
    rhs_e = d.power(0).scale(d.field.coerce(d.b()))
    worst = 0.0
    count = 0
    while count < n:
        pt = {v: complex(*rng.normal(size=2)) for v in d.holo}
        fv = d.f.evaluate(pt)
        if abs(fv) < 1e3 * SINGULARITY_GUARD:
            continue
        lam = complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
        a = lhs_e.evaluate(pt, lam)
        b = rhs_e.evaluate(pt, lam)
        worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
        count += 1
    return worst


# --------------------------------------------------------------------------------------
# catalog


def _datum_monomial(k: int) -> BernsteinDatum:
    vars = universe("z")
    f = Poly.monomial(vars, {"z": k})
    P = DiffOperator.partial(vars, ("z",), "z", k, Fraction(1, k ** k))
    roots = [(Fraction(-i, k), 1) for i in range(1, k + 1)]
    return BernsteinDatum("z" if k == 1 else f"z^{k}", ("z",), f, roots, P)


def _datum_product() -> BernsteinDatum:
    vars = universe("z1", "z2")
    f = Poly.parse("z1*z2", vars)
    P = DiffOperator(vars, ("z1", "z2"), {(1, 1): Poly.const(vars, 1)})
    return BernsteinDatum("z1*z2", ("z1", "z2"), f, [(Fraction(-1), 2)], P,
                          factors=[("z1", "z1"), ("z2", "z2")])


def _datum_quadric() -> BernsteinDatum:
    vars = universe("z1", "z2")
    f = Poly.parse("z1**2 + z2**2", vars)
    quarter = Poly.const(vars, Fraction(1, 4))
    P = DiffOperator(vars, ("z1", "z2"), {(2, 0): quarter, (0, 2): quarter})
    return BernsteinDatum("z1^2+z2^2", ("z1", "z2"), f, [(Fraction(-1), 2)], P)


def catalog() -> dict[str, BernsteinDatum]:
    data = [_datum_monomial(k) for k in range(1, 5)] + [_datum_product(), _datum_quadric()]
    return {d.name: d for d in data}


def lookup(spec: str) -> BernsteinDatum:
    """Find a catalog datum by name or by polynomial equality (``"z**2"`` finds ``z^2``)."""
    cat = catalog()
    key = spec.replace(" ", "")
    if key in cat:
        return cat[key]
    for d in cat.values():
        try:
            if Poly.parse(spec, d.vars) == d.f:
                return d
        except (ValueError, UniverseMismatch, SyntaxError):
            continue
    raise KeyError(f"no catalog entry for f = {spec!r}; known: {', '.join(cat)}")


def catalog_json() -> str:
    return json.dumps({"version": CATALOG_VERSION, "entries": [d.to_json() for d in catalog().values()]},
                      indent=2, sort_keys=True)


def load_catalog(text: str) -> dict[str, BernsteinDatum]:
    doc = json.loads(text)
    entries = doc["entries"] if isinstance(doc, dict) and "entries" in doc else doc
    return {e["name"]: BernsteinDatum.from_json(e) for e in entries}
