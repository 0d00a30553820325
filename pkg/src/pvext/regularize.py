"""Regularized pairings: cutoff limits, finite parts, continuation and comparisons."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import numpy as np

from .conventions import pairing_factor
from .expansion import oracle_coefficients, taylor_coefficients
from .quad import (
    DEFAULT_TOL,
    CutoffSweep,
    TAIL_FLOOR,
    PolarEngine,
    geometric_grid,
    pairing_integrand,
    integrate_boundary,
    monomial_degree,
    nested_product_integrate,
    sweep_values,
)
from .symbolic import LAMBDA, Poly, PowerLogExpr, RatField, universe
from .testform import TestForm, apply_adjoint
from .weyl import BernsteinDatum, DiffOperator, conjugate_op, iterate_bernstein


class ConvergenceError(RuntimeError):
    """A sweep did not settle, or a fit could not certify a limit."""


class PoleError(ArithmeticError):
    """The requested point is a root of the iterated Bernstein polynomial."""


def _c(x) -> complex:
    return complex(x)


# --------------------------------------------------------------------------------------
# problem geometry


@dataclass(frozen=True)
class Geometry:
    kind: str  # "monomial" | "product" | "general"
    k: int = 1  # monomial degree (monomial case)
    c_abs: float = 1.0

    @staticmethod
    def of(d: BernsteinDatum) -> "Geometry":
        if d.d == 1:
            md = monomial_degree(d.f, d.holo[0])
            if md is not None:
                return Geometry("monomial", md[1], abs(md[0]))
        if d.factors:
            return Geometry("product", 1)
        return Geometry("general")


def _factor_universes(d: BernsteinDatum):
    out = []
    for h in d.holo:
        vars = universe(h)
        out.append((vars, Poly.var(vars, h)))
    return out


def cutoff_values(d: BernsteinDatum, N: int, q: int, xi: TestForm, eps_grid, lam,
                  coeff: Poly | None = None, tol: float = DEFAULT_TOL, anti_power: int = 0):
    """Cutoff pairings ``<|f|^(2 lam) f^-N conj(f)^anti_power (L_f)^q coeff, xi>`` for each eps.

    Returns ``(values, errors, status)``; values carry one channel per lambda.
    """
    geo = Geometry.of(d)
    if geo.kind == "product":
        if coeff is not None:
            raise ValueError("polynomial coefficients are not supported in the product pairing")
        total = None
        errs = None
        status = "ok"
        # (L_1 + L_2)^q expands binomially; each piece is a product of one-variable weights
        for j in range(q + 1):
            qs = [j, q - j]
            factors = []
            for (vars, z), qi in zip(_factor_universes(d), qs):
                F = RatField(vars)
                logs = {F.coerce(z): qi} if qi else None
                w = PowerLogExpr.power(F, F.coerce(z), -N, anti_power, logs=logs)
                factors.append((z, w))
            res = nested_product_integrate(factors, xi, [list(eps_grid)] * len(factors), lam=lam, tol=tol)
            vals = [np.asarray(v) * comb(q, j) for v in res.value]
            e = [x * comb(q, j) for x in res.error]
            total = vals if total is None else [a + b for a, b in zip(total, vals)]
            errs = e if errs is None else [a + b for a, b in zip(errs, e)]
            if res.status != "ok":
                status = res.status
        return total, errs, status
    F = RatField(d.vars)
    f = F.coerce(d.f)
    logs = {f: q} if q else None
    w = PowerLogExpr.power(F, f, -N, anti_power, logs=logs, coeff=F.coerce(coeff) if coeff is not None else 1)
    vals, errs, status, _ = sweep_values(d.f, w, xi, list(eps_grid), lam=lam, tol=tol)
    return vals, errs, status


# --------------------------------------------------------------------------------------
# sweep fitting


@dataclass
class FitResult:
    limit: complex
    error: float
    exponents: list
    log_max: int
    residual: float
    tail_slope: float | None
    coefficients: list
    n_points: int

    def to_json(self):
        return {
            "limit": [self.limit.real, self.limit.imag],
            "error": self.error,
            "exponents": [[complex(e).real, complex(e).imag] for e in self.exponents],
            "log_max": self.log_max,
            "residual": self.residual,
            "tail_slope": self.tail_slope,
            "n_points": self.n_points,
        }


def _design(eps, exponents, log_max):
    le = np.log(eps)
    cols = [np.ones_like(eps, dtype=complex)]
    for e in exponents:
        base = np.exp(complex(e) * le)
        for j in range(log_max + 1):
            cols.append(base * le ** j)
    return np.array(cols).T


def _lstsq_limit(eps, vals, exponents, log_max):
    A = _design(eps, exponents, log_max)
    norms = np.linalg.norm(A, axis=0)
    norms[norms == 0] = 1
    coef, *_ = np.linalg.lstsq(A / norms, vals, rcond=None)
    coef = coef / norms
    resid = float(np.max(np.abs(A @ coef - vals))) if len(vals) else 0.0
    return coef, resid


def tail_slope(eps, vals, limit) -> float | None:
    """Log-log slope of ``|v - limit|`` over the tail (None if the tail sits on the noise floor)."""
    dev = np.abs(np.asarray(vals) - limit)
    scale = max(np.max(np.abs(vals)), 1e-300)
    keep = dev > 1e-13 * scale
    if keep.sum() < 3:
        return None
    return float(np.polyfit(np.log(np.asarray(eps)[keep]), np.log(dev[keep]), 1)[0])


FIT_TAIL = 12


def fit_sweep(eps, vals, exponents, log_max: int = 0, n_tail: int | None = FIT_TAIL) -> FitResult:
    """Least squares ``v(eps) = L + sum c_{e,j} eps^e (log eps)^j`` on the tail of a sweep.

    The limit's error is the spread between fits on the full tail and on a
    shorter tail with one fewer exponent, which exposes unresolved terms.
    """
    eps = np.asarray(eps, dtype=float)
    vals = np.asarray(vals, dtype=complex)
    n = len(eps) if n_tail is None else min(n_tail, len(eps))
    e_t, v_t = eps[-n:], vals[-n:]
    exps = sorted(exponents, key=lambda e: complex(e).real)
    max_exps = max(1, (n - 4) // (log_max + 1))
    exps = exps[:max_exps]
    ncols = 1 + len(exps) * (log_max + 1)
    if ncols >= n:
        raise ConvergenceError("not enough sweep points for the exponent model")
    coef, resid = _lstsq_limit(e_t, v_t, exps, log_max)
    limit = complex(coef[0])
    alt = []
    if len(exps) > 1:
        c2, _ = _lstsq_limit(e_t, v_t, exps[:-1], log_max)
        alt.append(complex(c2[0]))
    m = max(ncols + 2, (2 * n) // 3)
    if m < n:
        c3, _ = _lstsq_limit(e_t[-m:], v_t[-m:], exps, log_max)
        alt.append(complex(c3[0]))
    err = max([abs(a - limit) for a in alt], default=resid)
    err = max(err, resid)
    return FitResult(limit, float(err), exps, log_max, resid, tail_slope(e_t, v_t, limit),
                     [complex(c) for c in coef], n)


def lattice_exponents(alpha: complex, k: int, span: float = 4.0, kind: str = "monomial") -> list[complex]:
    """Exponents ``2 alpha + 2j/k`` (j >= 1) within ``span`` of the leading one.

    For products the sums of two such exponents are added.
    """
    a = complex(alpha)
    base = [2 * a + 2 * j / k for j in range(1, 4 * k + 4)]
    if kind == "product":
        base = base + [2 * a + 2 * a + 2 * i + 2 * j for i in range(1, 4) for j in range(1, 4)]
    lead = min(e.real for e in base)
    out = []
    for e in base:
        if e.real <= lead + span + 1e-12 and all(abs(e - o) > 1e-12 for o in out):
            out.append(e)
    return out


# --------------------------------------------------------------------------------------
# principal value


@dataclass
class PVResult:
    value: complex
    error: float
    status: str
    fit: FitResult | None
    sweep: CutoffSweep
    diagnostics: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "value": [self.value.real, self.value.imag],
            "error": self.error,
            "status": self.status,
            "fit": self.fit.to_json() if self.fit else None,
            "diagnostics": self.diagnostics,
        }


def pv_limit(d: BernsteinDatum, alpha, N: int, q: int, xi: TestForm, eps_grid=None,
             tol: float = DEFAULT_TOL, coeff: Poly | None = None, rel_tol: float = 1e-6,
             anti_power: int = 0) -> PVResult:
    """Limit of the cutoff pairing as eps -> 0, extrapolated on the exponent lattice."""
    a = _c(alpha)
    eps_grid = list(eps_grid) if eps_grid is not None else geometric_grid()
    geo = Geometry.of(d)
    if geo.kind == "general":
        raise ValueError("principal values are implemented for monomials and products")
    vals, errs, status = cutoff_values(d, N, q, xi, eps_grid, a, coeff, tol, anti_power)
    chan = np.array([complex(np.atleast_1d(v)[0]) for v in vals])
    sw = CutoffSweep(eps_grid, [complex(v) for v in chan], list(errs),
                     {"alpha": [a.real, a.imag], "N": N, "q": q, "f": d.name}, status)
    # an extra anti-holomorphic power only raises the exponents; keep the generic lattice
    exps = lattice_exponents(a, geo.k, kind=geo.kind)
    diag = {"sweep_status": status, "engine_error": float(max(errs))}
    if min(e.real for e in exps) <= 0:
        return PVResult(complex("nan"), float("inf"), "divergent", None, sw,
                        {**diag, "reason": "leading cutoff exponent has non-positive real part; use finite_part"})
    fit = fit_sweep(eps_grid, chan, exps, log_max=q)
    scale = max(abs(fit.limit), float(np.max(np.abs(chan))) * 1e-3, 1e-12)
    err = fit.error + float(errs[-1])
    ok = err <= max(rel_tol * scale, 10 * tol)
    st = "ok" if ok and status == "ok" else ("non-convergent" if not ok else status)
    diag.update({"tail_slope": fit.tail_slope, "fit_residual": fit.residual})
    return PVResult(fit.limit, err, st, fit, sw, diag)


# --------------------------------------------------------------------------------------
# meromorphic continuation


def choose_M(lam0, N: int, margin: float = 2.0, radius: float = 0.0) -> int:
    """Smallest ``M >= 0`` with ``Re(2 lam) - N + M >= margin`` on the disk of ``radius``."""
    re = _c(lam0).real - radius
    return max(0, math.ceil(margin - 2 * re + N - 1e-12))


def continued_values(d: BernsteinDatum, lams, N: int, xi: TestForm, M: int,
                     tol: float = DEFAULT_TOL) -> tuple[np.ndarray, float]:
    """``F(lam) = (1/B_M(lam)) <|f|^(2 lam) f^-N conj(f)^M, conj(P_M)^* xi>`` for each lam."""
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    P_M, B_M = iterate_bernstein(d, M)
    Pbar = conjugate_op(P_M)
    bvals = np.array([complex(B_M.evaluate({LAMBDA: l})) for l in lams])
    if np.any(bvals == 0):
        raise PoleError("lambda is a root of the iterated Bernstein polynomial; use laurent_coeffs")
    lam_dependent = any(LAMBDA in c.variables_used() for c in P_M.terms.values())
    if lam_dependent:
        out = np.zeros(len(lams), dtype=complex)
        err = 0.0
        for i, l in enumerate(lams):
            form = apply_adjoint(Pbar, xi, l)
            v, e, _ = cutoff_values(d, N, 0, form, [0.0], l, None, tol, anti_power=M)
            out[i] = np.atleast_1d(v[0])[0]
            err = max(err, e[0])
        return out / bvals, err / float(np.min(np.abs(bvals)))
    form = apply_adjoint(Pbar, xi)
    v, e, status = cutoff_values(d, N, 0, form, [0.0], lams, None, tol, anti_power=M)
    vals = np.atleast_1d(v[0])
    return vals / bvals, float(e[0]) / float(np.min(np.abs(bvals)))


@dataclass
class MerextResult:
    value: complex
    error: float
    M: int
    q: int
    radius: float | None = None
    nodes: int | None = None

    def to_json(self):
        return {"value": [self.value.real, self.value.imag], "error": self.error, "M": self.M,
                "q": self.q, "radius": self.radius, "nodes": self.nodes}


def _safe_radius(d: BernsteinDatum, lam0: complex, radius: float, M: int) -> float:
    roots = [complex(r) - j for r, _ in d.b_roots for j in range(M + 1)]
    r = radius
    for _ in range(20):
        if all(abs(abs(lam0 - z) - r) > 0.25 * r for z in roots):
            return r
        r *= 0.7
    return r


def merext_eval(d: BernsteinDatum, lam0, N: int, q: int, xi: TestForm, tol: float = DEFAULT_TOL,
                M: int | None = None, radius: float = 0.1, nodes: int = 32) -> MerextResult:
    """Value (q = 0) or q-th lambda-derivative of the continued pairing at ``lam0``."""
    lam0 = _c(lam0)
    if q == 0:
        M = choose_M(lam0, N) if M is None else M
        vals, err = continued_values(d, [lam0], N, xi, M, tol)
        return MerextResult(complex(vals[0]), err, M, 0)
    M = choose_M(lam0, N, radius=radius) if M is None else M
    radius = _safe_radius(d, lam0, radius, M)
    theta = 2 * np.pi * np.arange(nodes) / nodes
    lams = lam0 + radius * np.exp(1j * theta)
    vals, err = continued_values(d, lams, N, xi, M, tol)
    deriv = factorial(q) / radius ** q * np.mean(vals * np.exp(-1j * q * theta))
    return MerextResult(complex(deriv), err * factorial(q) / radius ** q, M, q, radius, nodes)


@dataclass
class LaurentData:
    center: complex
    coefficients: dict  # k -> P_k, the coefficient of (lam - center)^(-k)
    radius: float
    nodes: int
    M: int
    error: float
    pole_order_cap: int

    def P(self, k: int) -> complex:
        return self.coefficients[k]

    def scale(self) -> float:
        return max(max(abs(v) for v in self.coefficients.values()), 1e-300)

    def to_json(self):
        return {
            "center": [self.center.real, self.center.imag],
            "coefficients": {str(k): [v.real, v.imag] for k, v in sorted(self.coefficients.items())},
            "radius": self.radius,
            "nodes": self.nodes,
            "M": self.M,
            "error": self.error,
            "pole_order_cap": self.pole_order_cap,
        }


def laurent_coeffs(d: BernsteinDatum, alpha, N: int, xi: TestForm, radius: float = 0.1,
                   nodes: int = 32, M: int | None = None, K: int = 3,
                   tol: float = DEFAULT_TOL) -> LaurentData:
    """Discrete Fourier extraction of Laurent coefficients on a circle around ``alpha``."""
    a = _c(alpha)
    M = choose_M(a, N, radius=radius) if M is None else M
    theta = 2 * np.pi * np.arange(nodes) / nodes
    w = radius * np.exp(1j * theta)
    vals, err = continued_values(d, a + w, N, xi, M, tol)
    if not np.all(np.isfinite(vals)) or np.max(np.abs(vals)) > 1e12 * max(1.0, np.median(np.abs(vals))):
        raise PoleError("blow-up on the Cauchy circle; change the radius")
    cap = d.d + 1
    coeffs = {}
    for k in range(-K, cap + 3):
        # P_k = a_{-k} = (1/n) sum F(lam_j) w_j^k
        coeffs[k] = complex(np.mean(vals * w ** k))
    return LaurentData(a, coeffs, radius, nodes, M, err * max(1.0, radius ** (cap + 2)), cap)


# --------------------------------------------------------------------------------------
# comparison


@dataclass
class ComparisonReport:
    T: complex
    S: complex
    abs_discrepancy: float
    rel_discrepancy: float
    diagnostics: dict

    def to_json(self):
        return {
            "T": [self.T.real, self.T.imag],
            "S": [self.S.real, self.S.imag],
            "abs_discrepancy": self.abs_discrepancy,
            "rel_discrepancy": self.rel_discrepancy,
            "diagnostics": self.diagnostics,
        }


def integrand_l1(d: BernsteinDatum, lam, N: int, xi: TestForm, M: int, q: int = 0) -> float:
    """``int |f|^(2 Re lam) |f|^(M-N) |L_f|^q |conj(P_M)^* xi| dA / |B_M(lam)|``.

    This is the magnitude the continued integral is assembled from; values far
    below it are indistinguishable from zero in floating point.
    """
    lam = _c(lam)
    P_M, B_M = iterate_bernstein(d, M)
    form = apply_adjoint(conjugate_op(P_M), xi, lam)
    geo = Geometry.of(d)
    if geo.kind == "monomial":
        pieces = [(1.0, [form])]
    elif geo.kind == "product":
        pieces = form.separate()
    else:
        raise ValueError("integrand_l1 needs a monomial or product datum")
    total = 0.0
    cache = {}
    for coef, forms in pieces:
        prod = abs(coef)
        for i, fi in enumerate(forms):
            key = (i, repr(fi.to_json()))
            if key not in cache:
                h = fi.holo[0]
                vars = universe(h)
                F = RatField(vars)
                k = geo.k if geo.kind == "monomial" else 1
                fpoly = d.f if geo.kind == "monomial" else Poly.var(vars, h)
                ff = F.coerce(fpoly)
                logs = {ff: q} if q else None
                w = PowerLogExpr.power(F, ff, -N, M, logs=logs)
                g = pairing_integrand(w, fi, lam.real)
                eng = PolarEngine(lambda zz, g=g: np.abs(g(zz)), tol=1e-6)
                lo = math.log(TAIL_FLOOR ** (1.0 / k))
                res = eng.integrate(lo, math.log(fi.max_modulus_extent(0)))
                cache[key] = float(np.abs(np.atleast_1d(res.value)[0]))
            prod *= cache[key]
        total += prod
    return total / abs(complex(B_M.evaluate({LAMBDA: lam})))


def compare_T_S(d: BernsteinDatum, alpha, N: int, q: int, xi: TestForm, eps_grid=None,
                tol: float = DEFAULT_TOL, floor: float = 1e-12) -> ComparisonReport:
    """Principal value against the continued pairing.

    The relative discrepancy divides by ``max(|S|, floor * scale)`` where
    ``scale`` is the L1 size of the continued integrand, so data whose exact
    value is 0 (angular symmetry) are judged against rounding at that scale.
    """
    a = _c(alpha)
    if a.real < 0:
        raise ValueError("the comparison requires Re(alpha) >= 0")
    pv = pv_limit(d, a, N, q, xi, eps_grid, tol)
    me = merext_eval(d, a, N, q, xi, tol)
    diff = abs(pv.value - me.value)
    scale = integrand_l1(d, a, N, xi, choose_M(a, N), q)
    rel = diff / max(abs(me.value), floor * max(scale, 1.0))
    diag = {
        "pv_status": pv.status,
        "pv_error": pv.error,
        "tail_slope": pv.diagnostics.get("tail_slope"),
        "fit_exponents": [[complex(e).real, complex(e).imag] for e in (pv.fit.exponents if pv.fit else [])],
        "M": me.M,
        "merext_error": me.error,
        "cauchy_radius": me.radius,
        "integrand_l1": scale,
    }
    return ComparisonReport(pv.value, me.value, float(diff), float(rel), diag)


# --------------------------------------------------------------------------------------
# finite part


@lru_cache(maxsize=32)
def counterterm_constant(k: int = 1, alpha: float = -0.3, eps: float = 0.25) -> complex:
    """Angular-and-pairing constant ``C`` in ``int_{eps<=|s|<=1} |s|^(2a) dA = C (1 - eps^e)/e``.

    Derived numerically from the quadrature engine with a constant density so
    that no orientation convention is typed in by hand.
    """
    e = 2 * alpha + 2
    fac = pairing_factor(1)
    eng = PolarEngine(lambda z: fac * np.abs(z) ** (2 * alpha), tol=1e-13)
    res = eng.integrate(math.log(eps), 0.0)
    return complex(np.atleast_1d(res.value)[0]) * e / (1 - eps ** e)


def divergent_antiderivative(e: complex, j: int, eps: float) -> complex:
    """``G(eps)`` with ``int_eps^1 rho^(e-1) (log rho)^j d rho = G(1) - G(eps)``.

    For ``e = 0`` this is ``(log eps)^(j+1)/(j+1)``; otherwise the closed form
    ``rho^e sum_i (-1)^i j!/(j-i)! (log rho)^(j-i) / e^(i+1)``.
    """
    L = math.log(eps)
    if abs(e) < 1e-14:
        return L ** (j + 1) / (j + 1)
    total = 0j
    for i in range(j + 1):
        total += (-1) ** i * factorial(j) / factorial(j - i) * L ** (j - i) / e ** (i + 1)
    return complex(np.exp(e * L) * total)


@dataclass
class Counterterm:
    r: Fraction
    m: int
    m_prime: int
    j: int
    exponent: complex
    coefficient: complex  # fiber-expansion coefficient T~
    constant: complex

    def value(self, eps: float, q: int = 0) -> complex:
        return self.constant * self.coefficient * 2 ** q * divergent_antiderivative(self.exponent, self.j + q, eps)

    def to_json(self):
        return {"r": str(self.r), "m": self.m, "m_prime": self.m_prime, "j": self.j,
                "exponent": [self.exponent.real, self.exponent.imag],
                "coefficient": [self.coefficient.real, self.coefficient.imag],
                "constant": [self.constant.real, self.constant.imag]}


@dataclass
class FiniteResult:
    value: complex
    error: float
    status: str
    counterterms: list
    uncorrected_exponent: float | None
    corrected_fit: FitResult | None
    raw: list
    corrected: list

    def to_json(self):
        return {
            "value": [self.value.real, self.value.imag],
            "error": self.error,
            "status": self.status,
            "counterterms": [c.to_json() for c in self.counterterms],
            "uncorrected_exponent": self.uncorrected_exponent,
            "corrected_fit": self.corrected_fit.to_json() if self.corrected_fit else None,
        }


def divergence_exponent(eps, vals, n_tail: int = 10) -> float:
    """Real part of the leading exponent from log|successive differences| vs log eps."""
    eps = np.asarray(eps)
    vals = np.asarray(vals)
    dif = np.abs(np.diff(vals))
    x = np.log(eps[:-1])[-n_tail:]
    y = np.log(dif)[-n_tail:]
    return float(np.polyfit(x, y, 1)[0])


def finite_part(d: BernsteinDatum, alpha, N: int, xi: TestForm, eps_grid=None, q: int = 0,
                tol: float = DEFAULT_TOL, rel_tol: float = 1e-6) -> FiniteResult:
    """Limit of the cutoff pairing plus counterterms for ``f = c z^k``.

    Counterterm coefficients come from the zeta-normalized fiber expansion
    computed exactly from the Taylor data of the test form.
    """
    geo = Geometry.of(d)
    if geo.kind != "monomial":
        raise ValueError("finite parts are implemented for f = c*z^k")
    a = _c(alpha)
    k = geo.k
    eps_grid = list(eps_grid) if eps_grid is not None else geometric_grid()
    vals, errs, status = cutoff_values(d, N, q, xi, eps_grid, a, None, tol)
    raw = np.array([complex(np.atleast_1d(v)[0]) for v in vals])
    # triggered lattice points: m = m' + N and Re(alpha + r + m') <= 0
    C = counterterm_constant(1)
    if d.f.leading()[1] != 1:
        raise ValueError("finite parts assume a monic monomial f = z^k")
    max_mp = int(math.floor(-a.real)) + 2
    order = 2 * max_mp + N + 2
    taylor = taylor_coefficients(xi, k * order + 2)
    coeffs = oracle_coefficients(k, taylor, order, normalization="zeta")
    cts = []
    for (r, m, mp), v in sorted(coeffs.items()):
        if m != mp + N or abs(v) == 0:
            continue
        e = 2 * (a + float(r) + mp)
        if e.real > 1e-12:
            continue
        cts.append(Counterterm(r, m, mp, 0, e, complex(v), C))
    corrected = raw.copy()
    for ct in cts:
        corrected = corrected + np.array([ct.value(eps, q) for eps in eps_grid])
    div_exp = divergence_exponent(eps_grid, raw) if cts else None
    # corrected sweep converges with exponents beyond the triggered ones
    lattice = [e for e in lattice_exponents(a, k, span=8.0) if e.real > 1e-12]
    lattice = sorted(lattice, key=lambda e: e.real)
    lead = lattice[0].real if lattice else 2.0
    lattice = [e for e in lattice if e.real <= lead + 2 + 1e-12]
    fit = fit_sweep(eps_grid, corrected, lattice, log_max=q)
    scale = max(abs(fit.limit), 1e-12)
    ok = fit.error <= max(rel_tol * scale, 10 * tol)
    st = "ok" if ok else "non-convergent"
    return FiniteResult(fit.limit, fit.error + float(errs[-1]), st, cts, div_exp, fit, list(raw), list(corrected))


# --------------------------------------------------------------------------------------
# formal action and boundary decay


def vector_field(vars, coeffs: dict) -> DiffOperator:
    """Holomorphic vector field ``sum a_i d_i`` from ``{name: Poly or str}``."""
    holo = tuple(coeffs)
    terms = {}
    for i, h in enumerate(holo):
        c = coeffs[h]
        c = Poly.parse(c, vars) if isinstance(c, str) else c
        terms[tuple(1 if j == i else 0 for j in range(len(holo)))] = c
    return DiffOperator(vars, holo, terms)


def formal_action_check(d: BernsteinDatum, alpha, N: int, V: DiffOperator, xi: TestForm,
                        eps_grid=None, tol: float = DEFAULT_TOL) -> dict:
    """Compare ``<T_{a,N}, V^* xi>`` with ``(a - N) <V(f) |f|^(2a) f^(-N-1), xi>``."""
    a = _c(alpha)
    if a.real < 0:
        raise ValueError("formal action check requires Re(alpha) >= 0")
    if V.order() > 1:
        raise ValueError("V must be a vector field")
    Vstar_xi = xi.apply_operator(V.adjoint())
    lhs = pv_limit(d, a, N, 0, Vstar_xi, eps_grid, tol)
    # V(f) = sum a_i d_i f
    Vf = Poly.zero(d.vars)
    for alpha_idx, c in V.terms.items():
        if sum(alpha_idx) == 1:
            i = alpha_idx.index(1)
            Vf = Vf + c * d.f.diff(V.dvars[i])
    if Vf.is_zero():
        rhs_val, rhs_status = 0j, "ok"
    else:
        rhs = pv_limit(d, a, N + 1, 0, xi, eps_grid, tol, coeff=Vf)
        rhs_val, rhs_status = (a - N) * rhs.value, rhs.status
    diff = abs(lhs.value - rhs_val)
    rel = diff / max(abs(rhs_val), abs(lhs.value), 1e-12)
    if V.is_zero():
        rel = diff
    return {
        "lhs": [lhs.value.real, lhs.value.imag],
        "rhs": [rhs_val.real, rhs_val.imag],
        "abs_discrepancy": float(diff),
        "rel_discrepancy": float(rel),
        "lhs_status": lhs.status,
        "rhs_status": rhs_status,
        "V": str(V),
        "V_f": str(Vf),
    }


def boundary_decay_check(N: int, psi: TestForm, eps_grid=None, alpha=0.0, nodes: int = 256,
                         kind: str = "dzbar") -> dict:
    """Log-log slope of ``|int_{|z|=eps} z^-N psi|`` over the eps grid."""
    eps_grid = list(eps_grid) if eps_grid is not None else geometric_grid()
    pairs = [integrate_boundary(N, psi, e, nodes, alpha, kind, with_scale=True) for e in eps_grid]
    vals = np.array([v for v, _ in pairs])
    scales = np.array([sc for _, sc in pairs])
    mags = np.abs(vals)
    # a circle sum below 1e-12 of its own absolute mass is cancellation noise
    keep = mags > 1e-12 * scales
    if keep.sum() < 3:
        if not keep.any():
            return {"status": "identically-zero", "slope": None, "values": mags.tolist(), "passed": True}
        return {"status": "fit-failure", "slope": None, "values": mags.tolist(), "passed": False}
    x = np.log(np.asarray(eps_grid)[keep])
    y = np.log(mags[keep])
    slope = float(np.polyfit(x, y, 1)[0])
    return {"status": "ok", "slope": slope, "values": mags.tolist(), "passed": slope > 0}


def delta_constant(xi: TestForm, eps_grid=None, tol: float = 1e-12) -> dict:
    """``<d_z(1/zbar), xi> = -<1/zbar, d_z xi>`` divided by ``phi(0)``.

    The right side is an absolutely convergent integral; the cutoff sweep is
    extrapolated like any principal value.
    """
    if xi.d != 1:
        raise ValueError("one complex variable")
    h = xi.holo[0]
    vars = universe(h)
    F = RatField(vars)
    zb = F.var(f"{h[0]}b{h[1:]}")
    w = PowerLogExpr.from_element(F, zb.inverse())
    dxi = -xi.diff(h)
    z = Poly.var(vars, h)
    eps_grid = list(eps_grid) if eps_grid is not None else geometric_grid()
    vals, errs, _, _ = sweep_values(z, w, dxi, eps_grid, lam=0.0, tol=tol)
    chan = np.array([complex(np.atleast_1d(v)[0]) for v in vals])
    fit = fit_sweep(eps_grid, chan, [2.0, 4.0, 6.0])
    phi0 = complex(xi.evaluate({h: 0j}))
    c = fit.limit / phi0
    return {"c": c, "abs_c": abs(c), "phi0": phi0, "pairing": fit.limit, "error": fit.error}
