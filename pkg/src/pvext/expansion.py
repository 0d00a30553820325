"""Fiber integrals of ``f = z^k`` and their asymptotic expansions.

For ``s != 0`` the fiber ``{z^k = s}`` is k points, so the fiber integral of a
density is a finite sum over roots.  Three normalizations are used:

* ``theta``: ``sum_i phi(z_i)``
* ``zeta``:  ``sum_i phi(z_i) |z_i|^2 / k^2`` (volume form pushed forward, so
  ``int g(z) dA(z) = int |s|^-2 zeta(s) dA(s)`` for ``g = phi``)
* ``eta``:   ``sum_i g(z_i) conj(z_i) / k`` for (0,1)-forms ``g dzbar``

Each admits an expansion in ``|s|^(2r) s^m sbar^m'`` with ``r`` in ``{0, 1/k, ...}``.
The oracle computes it exactly from Taylor coefficients: a monomial
``z^a zbar^b`` survives the root sum iff ``a = b (mod k)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import numpy as np

from .symbolic import Poly, conj_name
from .testform import TestForm


def taylor_coefficients(phi, degree: int) -> dict:
    """``{(a, b): d^a dbar^b phi(0) / (a! b!)}`` for ``a + b <= degree``."""
    out = {}
    if isinstance(phi, Poly):
        holo = [v for v in phi.vars if v != "lam" and not v[1:].startswith("b")]
        h = holo[0]
        ih, ib = phi.index(h), phi.index(conj_name(h))
        for e, c in phi.terms.items():
            if e[ih] + e[ib] <= degree:
                out[(e[ih], e[ib])] = complex(c)
        return out
    if not isinstance(phi, TestForm) or phi.d != 1:
        raise ValueError("Taylor data needs a one-variable TestForm or Poly")
    h = phi.holo[0]
    hb = conj_name(h)
    cur = phi
    for a in range(degree + 1):
        inner = cur
        for b in range(degree - a + 1):
            v = complex(inner.evaluate({h: 0j}))
            if v != 0:
                out[(a, b)] = v / (factorial(a) * factorial(b))
            if b < degree - a:
                inner = inner.diff(hb)
        if a < degree:
            cur = cur.diff(h)
    return out


def lattice_point(k: int, a: int, b: int) -> tuple[Fraction, int, int]:
    """Position of ``z^a zbar^b`` (with ``a = b mod k``) in the ``(r, m, m')`` lattice."""
    c = min(a, b)
    t, j = divmod(c, k)
    return Fraction(j, k), t + (a - c) // k, t + (b - c) // k


def oracle_coefficients(k: int, taylor: dict, order, normalization: str = "theta") -> dict:
    """Exact expansion coefficients ``{(r, m, m'): value}`` with ``2r + m + m' <= order``."""
    out: dict = {}
    for (a, b), v in taylor.items():
        if normalization == "theta":
            A, B, w = a, b, k
        elif normalization == "zeta":
            A, B, w = a + 1, b + 1, 1.0 / k
        elif normalization == "eta":
            A, B, w = a, b + 1, 1.0
        else:
            raise ValueError("normalization must be theta, zeta or eta")
        if (A - B) % k:
            continue
        r, m, mp = lattice_point(k, A, B)
        if 2 * r + m + mp > order:
            continue
        key = (r, m, mp)
        out[key] = out.get(key, 0) + w * v
    return out


def fiber_values(phi, k: int, s: np.ndarray, normalization: str = "theta") -> np.ndarray:
    """Numeric fiber sums at points ``s`` (roots taken as ``|s|^(1/k) e^{i(arg s + 2 pi j)/k}``)."""
    s = np.asarray(s, dtype=complex)
    mod = np.abs(s) ** (1.0 / k)
    arg = np.angle(s)
    total = np.zeros(s.shape, dtype=complex)
    for j in range(k):
        z = mod * np.exp(1j * (arg + 2 * np.pi * j) / k)
        if isinstance(phi, Poly):
            h = [v for v in phi.vars if v != "lam" and not v[1:].startswith("b")][0]
            val = phi.evaluate({h: z, conj_name(h): np.conj(z)})
        else:
            val = phi.evaluate({phi.holo[0]: z})
        if normalization == "zeta":
            val = val * np.abs(z) ** 2 / k ** 2
        elif normalization == "eta":
            val = val * np.conj(z) / k
        total = total + val
    return total


@dataclass
class ExpansionTerm:
    r: Fraction
    m: int
    m_prime: int
    j: int
    coefficient: complex

    def to_json(self):
        return {"r": str(self.r), "m": self.m, "m_prime": self.m_prime, "j": self.j,
                "coefficient": [self.coefficient.real, self.coefficient.imag]}


@dataclass
class ExpansionModel:
    k: int
    order: int
    normalization: str
    terms: list
    oracle: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.check_invariant()

    def check_invariant(self):
        for t in self.terms:
            if t.r == 0 and t.j >= 1 and (t.m < 1 or t.m_prime < 1):
                raise ValueError(f"log term at r=0 needs m, m' >= 1: {t}")
            if not (0 <= t.r < 1) or t.m < 0 or t.m_prime < 0:
                raise ValueError(f"term outside the lattice: {t}")

    def coefficient(self, r, m, mp, j=0) -> complex:
        for t in self.terms:
            if (t.r, t.m, t.m_prime, t.j) == (Fraction(r), m, mp, j):
                return t.coefficient
        return 0j

    def max_discrepancy(self) -> float:
        keys = {(t.r, t.m, t.m_prime) for t in self.terms if t.j == 0} | set(self.oracle)
        return max((abs(self.coefficient(*key) - self.oracle.get(key, 0)) for key in keys), default=0.0)

    def exponents(self) -> set:
        return {t.r for t in self.terms}

    def evaluate(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=complex)
        out = np.zeros(s.shape, dtype=complex)
        for t in self.terms:
            term = np.abs(s) ** (2 * float(t.r)) * s ** t.m * np.conj(s) ** t.m_prime
            if t.j:
                term = term * np.log(np.abs(s)) ** t.j
            out = out + t.coefficient * term
        return out

    def to_json(self):
        return {
            "k": self.k,
            "order": self.order,
            "normalization": self.normalization,
            "terms": [t.to_json() for t in self.terms],
            "oracle": [
                {"r": str(r), "m": m, "m_prime": mp, "coefficient": [complex(v).real, complex(v).imag]}
                for (r, m, mp), v in sorted(self.oracle.items())
            ],
            "diagnostics": self.diagnostics,
        }


def lattice(k: int, order) -> list[tuple[Fraction, int, int]]:
    out = []
    for j in range(k):
        r = Fraction(j, k)
        for m in range(int(order) + 1):
            for mp in range(int(order) + 1):
                if 2 * r + m + mp <= order:
                    out.append((r, m, mp))
    return out


def ray_count(order: int) -> int:
    """Multiple of four (so the axes are always sampled) that separates all angular modes."""
    n = 4
    while n < 2 * order + 1:
        n += 4
    return n


def _basis(points, keys, log_keys=()):
    cols = []
    ab = np.abs(points)
    for r, m, mp in keys:
        cols.append(ab ** (2 * float(r)) * points ** m * np.conj(points) ** mp)
    for r, m, mp in log_keys:
        cols.append(ab ** (2 * float(r)) * points ** m * np.conj(points) ** mp * np.log(ab))
    return np.array(cols).T


def fiber_expansion(k: int, phi, order: int = 2, normalization: str = "theta",
                    extra_orders: int = 4, radii=(1e-3, 2e-2), n_radii: int = 24,
                    log_probe: bool = True) -> ExpansionModel:
    """Fit the fiber expansion from samples on rays and attach the exact oracle.

    The fit uses ``order + extra_orders`` so truncation does not leak into the
    reported coefficients; only terms with ``2r + m + m' <= order`` are returned.
    """
    if not 1 <= k <= 4:
        raise ValueError("k must be between 1 and 4")
    fit_order = order + extra_orders
    n_rays = ray_count(fit_order)
    rad = np.geomspace(radii[0], radii[1], n_radii)
    ang = 2 * np.pi * np.arange(n_rays) / n_rays
    pts = (rad[:, None] * np.exp(1j * ang)[None, :]).ravel()
    vals = fiber_values(phi, k, pts, normalization)
    keys = lattice(k, fit_order)
    A = _basis(pts, keys)
    norms = np.linalg.norm(A, axis=0)
    An = A / norms
    coef, *_ = np.linalg.lstsq(An, vals, rcond=None)
    coef = coef / norms
    cond = float(np.linalg.cond(An))
    resid = float(np.max(np.abs(A @ coef - vals)))
    terms = [ExpansionTerm(r, m, mp, 0, complex(c)) for (r, m, mp), c in zip(keys, coef)
             if 2 * r + m + mp <= order]
    degree = k * order + 2
    oracle = oracle_coefficients(k, taylor_coefficients(phi, degree), order, normalization)
    diag = {"condition_number": cond, "residual": resid, "rays": n_rays, "radii": list(radii),
            "fit_order": fit_order}
    if log_probe:
        diag.update(_log_probe(pts, vals, k, order))
    model = ExpansionModel(k, order, normalization, terms, oracle, diag)
    model.diagnostics["max_oracle_discrepancy"] = model.max_discrepancy()
    return model


def _log_probe(pts, vals, k, order):
    """Fit with the log terms the structural rule forbids and report their size."""
    keys = lattice(k, order + 2)
    forbidden = [(Fraction(0), m, mp) for m in range(order + 1) for mp in range(order + 1)
                 if m + mp <= order and (m == 0 or mp == 0)]
    A = _basis(pts, keys, forbidden)
    norms = np.linalg.norm(A, axis=0)
    coef, *_ = np.linalg.lstsq(A / norms, vals, rcond=None)
    coef = coef / norms
    logc = coef[len(keys):]
    scale = max(float(np.max(np.abs(vals))), 1e-300)
    return {"forbidden_log_max": float(np.max(np.abs(logc))) if len(logc) else 0.0,
            "forbidden_log_terms": [[str(r), m, mp] for r, m, mp in forbidden],
            "value_scale": scale}
