"""Expressions ``R * f^(m*lam + a) * conj(f)^(m'*lam + b) * prod L_g^q``.

``L_g`` stands for ``log|g|^2``.  Coefficients ``R`` live in a field
(:class:`RatField` or :class:`SqrtField`) whose universe contains ``lam``.
The conjugate exponent is written with ``lam`` rather than its conjugate so
that every expression stays holomorphic in the spectral parameter; for real
``lam`` the two readings agree.

Terms are kept canonical: exponent offsets are split into an integer part
(stored with the term) and a class representative (part of the key).  Terms of
the same class are merged at the smaller integer offset, so cancellations show
up as zero coefficients and equality reduces to subtracting and testing for
the empty sum.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from .gaussrat import GaussRat, ZERO
from .poly import LAMBDA, conj_name, is_bar
from .ratfn import DEFAULT_GUARD, SingularityError


def _split(a: GaussRat) -> tuple[int, GaussRat]:
    n = a.floor_real()
    return n, GaussRat(a.re - n, a.im)


def complete_env(vars, env: Mapping[str, object]) -> dict:
    """Fill conjugate coordinates as complex conjugates of the supplied holomorphic ones."""
    out = dict(env)
    for v in vars:
        if v == LAMBDA or v in out:
            continue
        partner = conj_name(v)
        if partner in out:
            out[v] = np.conj(out[partner])
    return out


class PowerLogExpr:
    """Finite sum of power/log terms over a coefficient field."""

    __slots__ = ("field", "terms")

    def __init__(self, field, terms=None):
        self.field = field
        self.terms = terms if terms is not None else {}

    # construction -------------------------------------------------------------
    @classmethod
    def zero(cls, field) -> "PowerLogExpr":
        return cls(field, {})

    @classmethod
    def from_element(cls, field, R) -> "PowerLogExpr":
        out = cls(field)
        out._insert(None, 0, ZERO, 0, ZERO, (), 0, 0, field.coerce(R))
        return out

    @classmethod
    def power(cls, field, f, a=0, b=0, *, holo_lam: int = 1, anti_lam: int = 1, coeff=1,
              logs: Mapping | None = None) -> "PowerLogExpr":
        """``coeff * f^(holo_lam*lam + a) * conj(f)^(anti_lam*lam + b) * prod L_g^q``."""
        f = field.coerce(f)
        if f.is_zero():
            raise ValueError("power carrier must be nonzero")
        a = GaussRat.coerce(a)
        b = GaussRat.coerce(b)
        ia, fa = _split(a)
        ib, fb = _split(b)
        out = cls(field)
        lk = _log_key(field, logs or {})
        out._insert(f, holo_lam, fa, anti_lam, fb, lk, ia, ib, field.coerce(coeff))
        return out

    @classmethod
    def abs_power(cls, field, f, N=0, coeff=1, q=0) -> "PowerLogExpr":
        """``coeff * |f|^(2 lam) * f^(-N) * (L_f)^q``."""
        logs = {f: q} if q else None
        return cls.power(field, f, -N, 0, coeff=coeff, logs=logs)

    @classmethod
    def log(cls, field, g, q: int = 1, coeff=1) -> "PowerLogExpr":
        out = cls(field)
        out._insert(None, 0, ZERO, 0, ZERO, _log_key(field, {g: q}), 0, 0, field.coerce(coeff))
        return out

    def copy(self) -> "PowerLogExpr":
        return PowerLogExpr(self.field, dict(self.terms))

    # canonical insertion -------------------------------------------------------
    def _insert(self, f, mh, fa, ma, fb, logs, ia, ib, R):
        if R.is_zero():
            return
        if f is not None:
            if mh == 0 and not fa:
                if ia:
                    R = R * f ** ia
                ia = 0
            if ma == 0 and not fb:
                if ib:
                    R = R * f.conj() ** ib
                ib = 0
            if mh == 0 and ma == 0 and not fa and not fb:
                f = None
        key = (f, mh, fa, ma, fb, logs)
        old = self.terms.get(key)
        if old is None:
            self.terms[key] = (ia, ib, R)
            return
        oa, ob, oR = old
        na, nb = min(ia, oa), min(ib, ob)
        fc = f.conj() if f is not None else None
        total = _rebase(oR, f, fc, oa - na, ob - nb) + _rebase(R, f, fc, ia - na, ib - nb)
        if total.is_zero():
            del self.terms[key]
        else:
            self.terms[key] = (na, nb, total)

    def _items(self):
        for (f, mh, fa, ma, fb, logs), (ia, ib, R) in self.terms.items():
            yield f, mh, fa + ia, ma, fb + ib, logs, R

    def _add_general(self, f, mh, a, ma, b, logs, R):
        ia, fa = _split(a)
        ib, fb = _split(b)
        self._insert(f, mh, fa, ma, fb, logs, ia, ib, R)

    # algebra -------------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def _check(self, other):
        if other.field != self.field:
            raise ValueError("expressions live over different coefficient fields")

    def __add__(self, other):
        if not isinstance(other, PowerLogExpr):
            other = PowerLogExpr.from_element(self.field, other)
        self._check(other)
        out = self.copy()
        for f, mh, a, ma, b, logs, R in other._items():
            out._add_general(f, mh, a, ma, b, logs, R)
        return out

    __radd__ = __add__

    def __neg__(self):
        return PowerLogExpr(self.field, {k: (ia, ib, -R) for k, (ia, ib, R) in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, PowerLogExpr):
            other = PowerLogExpr.from_element(self.field, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "PowerLogExpr":
        """Multiply by a field element or scalar."""
        c = self.field.coerce(c)
        out = PowerLogExpr(self.field)
        if c.is_zero():
            return out
        for f, mh, a, ma, b, logs, R in self._items():
            out._add_general(f, mh, a, ma, b, logs, R * c)
        return out

    def __mul__(self, other):
        if not isinstance(other, PowerLogExpr):
            try:
                return self.scale(other)
            except (TypeError, ValueError):
                return NotImplemented
        self._check(other)
        out = PowerLogExpr(self.field)
        for f1, mh1, a1, ma1, b1, l1, R1 in self._items():
            for f2, mh2, a2, ma2, b2, l2, R2 in other._items():
                if f1 is not None and f2 is not None and f1 != f2:
                    raise ValueError("products of different power carriers are not in the expression class")
                f = f1 if f1 is not None else f2
                logs = _merge_logs(l1, l2)
                out._add_general(f, mh1 + mh2, a1 + a2, ma1 + ma2, b1 + b2, logs, R1 * R2)
        return out

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, PowerLogExpr):
            if other.field != self.field:
                return False
            return (self - other).is_zero()
        return NotImplemented

    __hash__ = None

    # calculus --------------------------------------------------------------------
    def diff(self, var: str, side: str | None = None) -> "PowerLogExpr":
        """Partial derivative in ``var``; ``side`` ('holo'/'anti') is checked against the name."""
        if var not in self.field.vars or var == LAMBDA:
            raise ValueError(f"{var!r} is not a coordinate of this expression")
        if side is not None:
            expected = "anti" if is_bar(var) else "holo"
            if side != expected:
                raise ValueError(f"variable {var!r} belongs to the {expected} side")
        lam = self.field.var(LAMBDA) if LAMBDA in self.field.vars else None
        out = PowerLogExpr(self.field)
        cache: dict = {}

        def d(x):
            key = ("d", x)
            if key not in cache:
                cache[key] = x.diff(var)
            return cache[key]

        def dlog(g):
            key = ("l", g)
            if key not in cache:
                gc = g.conj()
                val = d(g) / g if not d(g).is_zero() else self.field.zero()
                dgc = d(gc)
                if not dgc.is_zero():
                    val = val + dgc / gc
                cache[key] = val
            return cache[key]

        for f, mh, a, ma, b, logs, R in self._items():
            dR = R.diff(var)
            if not dR.is_zero():
                out._add_general(f, mh, a, ma, b, logs, dR)
            if f is not None:
                df = d(f)
                if not df.is_zero() and (mh or a):
                    c = self.field.const(a) if not mh else lam * mh + a
                    out._add_general(f, mh, a - 1, ma, b, logs, R * c * df)
                fc = f.conj()
                dfc = d(fc)
                if not dfc.is_zero() and (ma or b):
                    c = self.field.const(b) if not ma else lam * ma + b
                    out._add_general(f, mh, a, ma, b - 1, logs, R * c * dfc)
            for idx, (g, q) in enumerate(logs):
                dl = dlog(g)
                if dl.is_zero():
                    continue
                nl = list(logs)
                if q == 1:
                    del nl[idx]
                else:
                    nl[idx] = (g, q - 1)
                out._add_general(f, mh, a, ma, b, tuple(nl), R * dl * q)
        return out

    def conj(self) -> "PowerLogExpr":
        """Complex conjugate with ``lam`` treated as real."""
        out = PowerLogExpr(self.field)
        for f, mh, a, ma, b, logs, R in self._items():
            nl = _log_key(self.field, {g.conj(): q for g, q in logs})
            out._add_general(f, ma, b.conjugate(), mh, a.conjugate(), nl, R.conj())
        return out

    def shift_lambda(self, j) -> "PowerLogExpr":
        """Substitute ``lam -> lam + j``."""
        j = GaussRat.coerce(j)
        out = PowerLogExpr(self.field)
        for f, mh, a, ma, b, logs, R in self._items():
            out._add_general(f, mh, a + j * mh, ma, b + j * ma, logs, R.shift(LAMBDA, j))
        return out

    def subs_lambda(self, value) -> "PowerLogExpr":
        """Set ``lam`` to an exact value; powers become fixed exponents."""
        v = GaussRat.coerce(value)
        out = PowerLogExpr(self.field)
        for f, mh, a, ma, b, logs, R in self._items():
            out._add_general(f, 0, a + v * mh, 0, b + v * ma, logs, R.subs(LAMBDA, v))
        return out

    def map_coefficients(self, fn) -> "PowerLogExpr":
        out = PowerLogExpr(self.field)
        for f, mh, a, ma, b, logs, R in self._items():
            out._add_general(f, mh, a, ma, b, logs, fn(R))
        return out

    def carriers(self) -> set:
        return {k[0] for k in self.terms if k[0] is not None}

    def max_log_power(self) -> int:
        return max((sum(q for _, q in k[5]) for k in self.terms), default=0)

    # numerics ------------------------------------------------------------------------
    def evaluate(self, point: Mapping[str, object], lambda_value=0.0, guard: float = DEFAULT_GUARD):
        """Numeric value with principal logarithms; conjugate coordinates default to conjugates."""
        env = complete_env(self.field.vars, point)
        if LAMBDA in self.field.vars:
            env[LAMBDA] = lambda_value
        lam = lambda_value
        total = 0j
        logcache: dict = {}
        for f, mh, a, ma, b, logs, R in self._items():
            val = R.evaluate(env, guard)
            if f is not None:
                if f not in logcache:
                    fv = np.asarray(f.evaluate(env, guard), dtype=complex)
                    if np.any(np.abs(fv) < guard):
                        raise SingularityError(f"power carrier {f} below guard {guard}")
                    logcache[f] = np.log(fv)
                lf = logcache[f]
                ex = (mh * lam + complex(a)) * lf + (ma * lam + complex(b)) * np.conj(lf)
                val = val * np.exp(ex)
            for g, q in logs:
                key = ("L", g)
                if key not in logcache:
                    gv = np.asarray(g.evaluate(env, guard), dtype=complex)
                    if np.any(np.abs(gv) < guard):
                        raise SingularityError(f"log argument {g} below guard {guard}")
                    logcache[key] = np.log(np.abs(gv) ** 2)
                val = val * logcache[key] ** q
            total = total + val
        return total

    # display -----------------------------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for f, mh, a, ma, b, logs, R in sorted(self._items(), key=lambda t: str(t)):
            s = f"({R})"
            if f is not None:
                if mh or a:
                    s += f"*[{f}]^({_exp_str(mh, a)})"
                if ma or b:
                    s += f"*conj[{f}]^({_exp_str(ma, b)})"
            for g, q in logs:
                s += f"*L[{g}]" + (f"^{q}" if q > 1 else "")
            parts.append(s)
        return " + ".join(parts)

    def __repr__(self):
        return f"PowerLogExpr({self})"


def _exp_str(m: int, a: GaussRat) -> str:
    lam = "" if not m else ("lam" if m == 1 else f"{m}*lam")
    if not a:
        return lam or "0"
    if not lam:
        return str(a)
    return f"{lam}+{a}" if a.re >= 0 and not a.im else f"{lam}+({a})"


def _log_key(field, logs: Mapping) -> tuple:
    items = []
    for g, q in logs.items():
        if q < 0 or int(q) != q:
            raise ValueError("log powers must be non-negative integers")
        if q:
            items.append((field.coerce(g), int(q)))
    items.sort(key=lambda t: str(t[0]))
    return tuple(items)


def _merge_logs(l1: tuple, l2: tuple) -> tuple:
    acc: dict = {}
    for g, q in l1 + l2:
        acc[g] = acc.get(g, 0) + q
    return tuple(sorted(acc.items(), key=lambda t: str(t[0])))


def _rebase(R, f, fc, da: int, db: int):
    if da:
        R = R * f ** da
    if db:
        R = R * fc ** db
    return R
