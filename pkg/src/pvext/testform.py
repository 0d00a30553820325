"""Compactly supported bump densities closed under exact differentiation.

Per complex coordinate ``z_j`` with center ``c_j`` and radius ``rho_j`` let
``t_j = |z_j - c_j|^2 / rho_j^2`` and ``u_j = 1/(1 - t_j)``.  The bump is
``B(t) = exp(1/(t-1)) = exp(-u)`` on ``t < 1`` and 0 elsewhere.  A form is
``sum p(z, zbar) * prod_j u_j^(n_j) B(t_j)``; since ``du/dt = u^2`` the class is
closed under ``d/dz_j`` and ``d/dzbar_j``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import factorial
from typing import Mapping

import numpy as np

from .symbolic import LAMBDA, GaussRat, Poly, conj_name, universe
from .weyl import DiffOperator


class TestForm:
    __test__ = False  # keep pytest from collecting this class

    def __init__(self, holo, centers, radii, terms: Mapping[tuple, Poly]):
        self.holo = tuple(holo)
        self.vars = universe(*self.holo, lam=False)
        self.centers = tuple(GaussRat.coerce(c) for c in centers)
        self.radii = tuple(Fraction(r) if not isinstance(r, Fraction) else r for r in radii)
        if len(self.centers) != len(self.holo) or len(self.radii) != len(self.holo):
            raise ValueError("one center and one radius per coordinate")
        for r in self.radii:
            if r <= 0:
                raise ValueError("radii must be positive")
        clean = {}
        for ns, p in terms.items():
            if p.vars != self.vars:
                p = p.reuniverse(self.vars)
            if not p.is_zero():
                clean[tuple(ns)] = p
        self.terms = clean
        self._compiled = None

    @property
    def d(self) -> int:
        return len(self.holo)

    def _like(self, terms) -> "TestForm":
        return TestForm(self.holo, self.centers, self.radii, terms)

    def is_zero(self) -> bool:
        return not self.terms

    # algebra -----------------------------------------------------------------------
    def __add__(self, other: "TestForm") -> "TestForm":
        self._check(other)
        out = dict(self.terms)
        for ns, p in other.terms.items():
            out[ns] = out[ns] + p if ns in out else p
        return self._like(out)

    def __neg__(self):
        return self._like({ns: -p for ns, p in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TestForm":
        if isinstance(c, Poly):
            c = c.reuniverse(self.vars) if c.vars != self.vars else c
        return self._like({ns: p * c for ns, p in self.terms.items()})

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TestForm):
            return NotImplemented
        return (self.holo, self.centers, self.radii, self.terms) == (other.holo, other.centers, other.radii, other.terms)

    __hash__ = None

    def _check(self, other: "TestForm"):
        if (self.holo, self.centers, self.radii) != (other.holo, other.centers, other.radii):
            raise ValueError("test forms with different supports cannot be combined")

    # calculus --------------------------------------------------------------------------
    def diff(self, var: str, side: str | None = None) -> "TestForm":
        """Exact derivative in a holomorphic coordinate or its conjugate."""
        if var in self.holo:
            j = self.holo.index(var)
            got = "holo"
            other = conj_name(var)
            shift = GaussRat.coerce(self.centers[j]).conjugate()
        elif conj_name(var) in self.holo:
            j = self.holo.index(conj_name(var))
            got = "anti"
            other = conj_name(var)
            shift = self.centers[j]
        else:
            raise ValueError(f"{var!r} is not a coordinate of this form")
        if side is not None and side != got:
            raise ValueError(f"{var!r} is a {got} variable")
        # d t / d var = (other - shift) / rho^2
        dt = (Poly.var(self.vars, other) - shift) * Fraction(1, self.radii[j] ** 2)
        out: dict = {}

        def add(ns, p):
            if p.is_zero():
                return
            out[ns] = out[ns] + p if ns in out else p

        for ns, p in self.terms.items():
            add(ns, p.diff(var))
            n = ns[j]
            up1 = ns[:j] + (n + 1,) + ns[j + 1:]
            up2 = ns[:j] + (n + 2,) + ns[j + 1:]
            pd = p * dt
            if n:
                add(up1, pd * n)
            add(up2, -pd)
        return self._like(out)

    def diff_multi(self, dvars, alpha) -> "TestForm":
        out = self
        for v, k in zip(dvars, alpha):
            for _ in range(k):
                out = out.diff(v)
        return out

    def apply_operator(self, P: DiffOperator) -> "TestForm":
        """``sum c_alpha d^alpha (self)`` with ``lam``-free coefficients."""
        out = self._like({})
        cache: dict = {}
        for alpha in sorted(P.terms):
            c = P.terms[alpha]
            if LAMBDA in c.vars and LAMBDA in c.variables_used():
                raise ValueError("substitute lam before applying to a test form")
            if alpha not in cache:
                cache[alpha] = self.diff_multi(P.dvars, alpha)
            out = out + cache[alpha].scale(c.reuniverse(self.vars))
        return out

    def multiply(self, p: Poly) -> "TestForm":
        return self.scale(p)

    # numerics ------------------------------------------------------------------------------
    def _compile(self):
        if self._compiled is None:
            groups = {}
            for ns, p in self.terms.items():
                groups[ns] = p
            self._compiled = groups
        return self._compiled

    def evaluate(self, point: Mapping[str, object]):
        """Density value; exactly 0 outside the support.  ``point`` maps holomorphic names to arrays."""
        zs = [np.asarray(point[h], dtype=complex) for h in self.holo]
        shape = np.broadcast(*zs).shape if zs else ()
        zs = [np.broadcast_to(z, shape) for z in zs]
        inside = np.ones(shape, dtype=bool)
        logu = []
        us = []
        for z, c, r in zip(zs, self.centers, self.radii):
            t = np.abs(z - complex(c)) ** 2 / float(r) ** 2
            inside &= t < 1
            tt = np.where(t < 1, t, 0.0)
            u = 1.0 / (1.0 - tt)
            us.append(u)
            logu.append(np.log(u))
        out = np.zeros(shape, dtype=complex)
        if not self.terms or not inside.any():
            return out if shape else complex(0)
        env = {}
        for h, z in zip(self.holo, zs):
            env[h] = z[inside]
            env[conj_name(h)] = np.conj(z[inside])
        base = -sum(u[inside] for u in us)
        lu = [l[inside] for l in logu]
        acc = np.zeros(int(inside.sum()), dtype=complex)
        for ns, p in self._compile().items():
            ex = base.copy()
            for n, l in zip(ns, lu):
                if n:
                    ex = ex + n * l
            acc = acc + p.evaluate(env) * np.exp(ex)
        out[inside] = acc
        return out if shape else complex(out)

    def __call__(self, *zs):
        return self.evaluate(dict(zip(self.holo, zs)))

    def taylor_coefficient(self, a, b) -> complex:
        """``d^a dbar^b phi (0) / (a! b!)`` per coordinate (a, b are tuples over coordinates)."""
        form = self
        for h, ai, bi in zip(self.holo, a, b):
            form = form.diff_multi((h, conj_name(h)), (ai, bi))
        val = form.evaluate({h: 0j for h in self.holo})
        den = 1
        for ai, bi in zip(a, b):
            den *= factorial(ai) * factorial(bi)
        return complex(val) / den

    def support_box(self) -> list[tuple[float, float, float, float]]:
        """Per coordinate ``(xmin, xmax, ymin, ymax)``."""
        out = []
        for c, r in zip(self.centers, self.radii):
            cx, cy, rr = float(c.re), float(c.im), float(r)
            out.append((cx - rr, cx + rr, cy - rr, cy + rr))
        return out

    def max_modulus_extent(self, j: int = 0) -> float:
        return abs(complex(self.centers[j])) + float(self.radii[j])

    def separate(self) -> list[tuple[complex, list["TestForm"]]]:
        """Split into sums of products of one-coordinate forms (each monomial factorizes)."""
        pieces = []
        for ns, p in self.terms.items():
            for exps, c in p.terms.items():
                factors = []
                for j, h in enumerate(self.holo):
                    sub = universe(h, lam=False)
                    hb = conj_name(h)
                    e = {h: exps[self.vars.index(h)], hb: exps[self.vars.index(hb)]}
                    mono = Poly.monomial(sub, e)
                    factors.append(TestForm((h,), (self.centers[j],), (self.radii[j],), {(ns[j],): mono}))
                pieces.append((complex(c), factors))
        return pieces

    def restrict(self, j: int) -> "TestForm":
        """One-coordinate bump sharing coordinate ``j``'s support (density p = 1)."""
        h = self.holo[j]
        return make_bump((h,), (self.centers[j],), (self.radii[j],))

    def __str__(self):
        parts = []
        for ns in sorted(self.terms):
            us = "*".join(f"u{j + 1}^{n}" for j, n in enumerate(ns) if n)
            parts.append(f"({self.terms[ns]})" + (f"*{us}" if us else ""))
        return (" + ".join(parts) or "0") + " * B"

    def __repr__(self):
        return f"TestForm({self})"

    def to_json(self) -> dict:
        return {
            "holomorphic": list(self.holo),
            "centers": [c.to_json() for c in self.centers],
            "radii": [str(r) for r in self.radii],
            "terms": [[list(ns), self.terms[ns].to_json()] for ns in sorted(self.terms)],
        }

    @classmethod
    def from_json(cls, data) -> "TestForm":
        holo = tuple(data["holomorphic"])
        vars = universe(*holo, lam=False)
        terms = {tuple(ns): Poly.from_json(vars, p) for ns, p in data["terms"]}
        return cls(holo, [GaussRat.from_json(c) for c in data["centers"]],
                   [Fraction(r) for r in data["radii"]], terms)


def make_bump(holo, centers=None, radii=None, p: Poly | str | None = None) -> TestForm:
    holo = tuple(holo)
    vars = universe(*holo, lam=False)
    centers = centers if centers is not None else [0] * len(holo)
    radii = radii if radii is not None else [1] * len(holo)
    if p is None:
        p = Poly.const(vars, 1)
    elif isinstance(p, str):
        p = Poly.parse(p, vars)
    return TestForm(holo, centers, radii, {(0,) * len(holo): p})


def apply_adjoint(P: DiffOperator, xi: TestForm, lam_value=None) -> TestForm:
    """Formal adjoint of ``P`` applied to ``xi``; ``lam`` is first set to ``lam_value``."""
    if lam_value is not None:
        P = P.subs_lambda(exact(lam_value))
    return xi.apply_operator(P.adjoint())


def exact(value) -> GaussRat:
    """Exact Gaussian rational from a number; floats convert through their repr."""
    if isinstance(value, GaussRat):
        return value
    if isinstance(value, complex):
        return GaussRat(Fraction(repr(value.real)), Fraction(repr(value.imag)))
    if isinstance(value, float):
        return GaussRat(Fraction(repr(value)))
    return GaussRat.coerce(value)


# named forms used by the command line and the acceptance suite
def named_form(name: str, holo=("z",)) -> TestForm:
    holo = tuple(holo)
    d = len(holo)
    if name == "radial":
        return make_bump(holo)
    if name == "nonradial":
        if d == 1:
            h = holo[0]
            return make_bump(holo, p=f"1 + {h} + {h}**2/2 + {conj_name(h)}/3 + (1/4)*{h}*{conj_name(h)}")
        h1, h2 = holo
        return make_bump(holo, p=f"1 + {h1}*{h2} + {h1}/2 + {conj_name(h2)}/3 + (1/2)*{h1}**2*{h2}**2")
    if name == "offset":
        return make_bump(holo, centers=[GaussRat(Fraction(1, 5), Fraction(1, 10))] * d, radii=[1] * d)
    if name == "wide":
        return make_bump(holo, radii=[Fraction(3, 2)] * d,
                         p=" + ".join(["1"] + [f"{h}**2*{conj_name(h)}/5" for h in holo]))
    if name.endswith(".json"):
        with open(name) as fh:
            return TestForm.from_json(json.load(fh))
    raise KeyError(f"unknown test form {name!r} (radial, nonradial, offset, wide, or a .json path)")


FORM_NAMES = ("radial", "nonradial", "offset", "wide")
