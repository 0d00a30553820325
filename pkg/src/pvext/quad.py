"""Quadrature for cutoff pairings, circle integrals, epsilon sweeps and products.

Two engines:

* polar: for ``f = c * z^k`` in one variable the cutoff ``|f| >= eps`` is a
  disk complement, so we integrate in ``s = log rho`` with adaptive
  Gauss-Legendre panels and in ``theta`` with a doubling trapezoid rule.  The
  log substitution keeps power singularities smooth; ``eps = 0`` is handled by
  a lower radius where the tail is far below tolerance.
* box: adaptive tensor Gauss rules on real boxes (2 or 4 real dimensions) with
  cut cells masked at the nodes, for everything else.

Integrands are vector valued along a leading "channel" axis (one channel per
lambda value) so Cauchy-circle evaluations share all geometry.
"""

from __future__ import annotations

import csv
import heapq
import io
import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .conventions import SINGULARITY_GUARD, pairing_factor
from .symbolic import Poly, PowerLogExpr, RatField, SingularityError, conj_name, universe
from .testform import TestForm

Integrand = Callable[[np.ndarray], np.ndarray]

DEFAULT_TOL = 1e-10
TAIL_FLOOR = 1e-9  # |f| below which an absolutely convergent integrand is cut off


@dataclass
class QuadResult:
    value: np.ndarray | complex
    error: float
    evaluations: int = 0
    status: str = "ok"
    panels: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@lru_cache(maxsize=16)
def _gauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _as_channels(v: np.ndarray, npts_shape) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.shape == tuple(npts_shape):
        return v[None, ...]
    return v


# --------------------------------------------------------------------------------------
# polar engine


class PolarEngine:
    """Adaptive integration of ``int g(z) dx dy`` over annuli in ``s = log|z|``."""

    def __init__(self, g: Integrand | None, tol: float = DEFAULT_TOL, order: int = 15,
                 max_panels: int = 4000, theta_start: int = 64, theta_max: int = 16384,
                 radial: Callable[[np.ndarray], np.ndarray] | None = None):
        if g is None and radial is None:
            raise ValueError("need an integrand or its exact angular average")
        self.g = g
        self.radial = radial
        self.tol = tol
        self.order = order
        self.max_panels = max_panels
        self.theta_start = theta_start
        self.theta_max = theta_max
        self.evaluations = 0

    def _angular(self, s: np.ndarray, atol: float) -> np.ndarray:
        """``rho^2 * int_0^{2pi} g(rho e^{i theta}) d theta`` at each ``s`` (channels first)."""
        rho = np.exp(s)
        if self.radial is not None:
            self.evaluations += len(s)
            return _as_channels(self.radial(rho), (len(s),)) * rho ** 2
        n = self.theta_start
        theta = 2 * np.pi * np.arange(n) / n
        vals = _as_channels(self.g(rho[:, None] * np.exp(1j * theta)[None, :]), (len(s), n))
        self.evaluations += vals.shape[-1] * len(s)
        total = vals.sum(axis=-1)
        T = total * (2 * np.pi / n)
        w = rho ** 2
        while True:
            mid = theta + np.pi / n
            more = _as_channels(self.g(rho[:, None] * np.exp(1j * mid)[None, :]), (len(s), n))
            self.evaluations += more.shape[-1] * len(s)
            total = total + more.sum(axis=-1)
            n2 = 2 * n
            T2 = total * (2 * np.pi / n2)
            diff = np.max(np.abs(T2 - T) * w) if T.size else 0.0
            scale = np.max(np.abs(T2) * w) if T.size else 0.0
            theta = np.concatenate([theta, mid])
            n = n2
            T = T2
            if diff <= max(atol, 1e-14 * scale) or n >= self.theta_max:
                break
        return T * w

    def _panel(self, a: float, b: float, atol: float) -> np.ndarray:
        x, wts = _gauss(self.order)
        s = 0.5 * (b - a) * x + 0.5 * (a + b)
        A = self._angular(s, atol)
        return 0.5 * (b - a) * (A @ wts)

    def integrate(self, s_lo: float, s_hi: float, tol: float | None = None) -> QuadResult:
        tol = self.tol if tol is None else tol
        if s_hi <= s_lo:
            return QuadResult(np.zeros(1, dtype=complex), 0.0, 0, "ok", 0)
        width = s_hi - s_lo
        n0 = max(1, int(np.ceil(width / 0.75)))
        edges = np.linspace(s_lo, s_hi, n0 + 1)
        atol = 1e-2 * tol / width
        heap = []
        counter = itertools.count()
        done = []
        for a, b in zip(edges[:-1], edges[1:]):
            heap.append(self._make_entry(a, b, atol, counter))
        heapq.heapify(heap)
        total_err = sum(-e[0] for e in heap)
        status = "ok"
        while total_err > tol and heap:
            if len(heap) + len(done) >= self.max_panels:
                status = "budget-exceeded"
                break
            negerr, _, a, b, val, halves = heapq.heappop(heap)
            total_err += negerr
            m = 0.5 * (a + b)
            left = self._make_entry(a, m, atol, counter, halves[0])
            right = self._make_entry(m, b, atol, counter, halves[1])
            for entry in (left, right):
                if -entry[0] <= 1e-3 * tol * (entry[3] - entry[2]) / width:
                    done.append(entry)
                else:
                    heapq.heappush(heap, entry)
                total_err += -entry[0]
        entries = sorted(heap + done, key=lambda e: e[2])
        value = sum(e[4] for e in entries)
        err = float(sum(-e[0] for e in entries))
        return QuadResult(np.atleast_1d(value), err, self.evaluations, status, len(entries))

    def _make_entry(self, a, b, atol, counter, whole=None):
        if whole is None:
            whole = self._panel(a, b, atol)
        m = 0.5 * (a + b)
        left = self._panel(a, m, atol)
        right = self._panel(m, b, atol)
        refined = left + right
        err = float(np.max(np.abs(refined - whole)))
        return (-err, next(counter), a, b, refined, (left, right))


def monomial_degree(f: Poly, holo: str) -> tuple[complex, int] | None:
    """``(c, k)`` if ``f = c * holo^k`` with ``k >= 1``, else None."""
    if not f.is_monomial():
        return None
    exps, c = f.leading()
    k = 0
    for v, e in zip(f.vars, exps):
        if v == holo:
            k = e
        elif e:
            return None
    if k < 1:
        return None
    return complex(c), k


def polar_sweep(g: Integrand | None, k: int, c_abs: float, rho_max: float, eps_list: Sequence[float],
                tol: float = DEFAULT_TOL, **engine_kw) -> tuple[list[np.ndarray], list[float], str, int]:
    """Cutoff integrals over ``|c z^k| >= eps`` for every eps, sharing radial segments.

    ``eps = 0`` means "down to the tail floor" for absolutely integrable data.
    Returns values (channel arrays), cumulative error bounds, status and evaluations.
    """
    eng = PolarEngine(g, tol=tol, **engine_kw)
    s_hi = float(np.log(rho_max))
    starts = []
    for eps in eps_list:
        if eps < 0:
            raise ValueError("eps must be non-negative")
        if eps == 0:
            eff = TAIL_FLOOR
        else:
            if eps < SINGULARITY_GUARD:
                raise SingularityError(f"cutoff {eps} below singularity guard")
            eff = eps
        starts.append(float(np.log((eff / c_abs) ** (1.0 / k))))
    bps = sorted(set(min(s, s_hi) for s in starts), reverse=True)
    seg_tol = tol / max(1, len(bps))
    status = "ok"
    cum_val = {}
    cum_err = {}
    acc = None
    err = 0.0
    prev = s_hi
    for s in bps:
        res = eng.integrate(s, prev, seg_tol) if s < prev else None
        if res is not None:
            acc = res.value if acc is None else acc + res.value
            err += res.error
            if res.status != "ok":
                status = res.status
        cum_val[s] = acc
        cum_err[s] = err
        prev = s
    values, errors = [], []
    for s in starts:
        key = min(s, s_hi)
        v = cum_val[key]
        values.append(np.zeros(1, dtype=complex) if v is None else v)
        errors.append(max(cum_err[key], 1e-300))
    return values, errors, status, eng.evaluations


# --------------------------------------------------------------------------------------
# box engine


def _tensor_rule(dim: int, order: int):
    x, w = _gauss(order)
    pts = np.array(list(itertools.product(x, repeat=dim)))
    wts = np.prod(np.array(list(itertools.product(w, repeat=dim))), axis=1)
    return pts, wts


def box_integrate(g: Callable[[np.ndarray], np.ndarray], lo, hi,
                  mask: Callable[[np.ndarray], np.ndarray] | None = None,
                  tol: float = 1e-8, order: int = 8, max_cells: int = 20000,
                  min_width: float = 1e-6) -> QuadResult:
    """Adaptive tensor Gauss over ``[lo, hi]`` in real coordinates.

    ``g`` receives an array of shape ``(npts, dim)``; ``mask`` returns True where
    the region includes the point.  Cells whose nodes disagree on the mask are
    refined like any other cell; the comparison parent/children is the error.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    dim = len(lo)
    ref, wref = _tensor_rule(dim, order)
    evals = 0

    def cell(a, b):
        nonlocal evals
        half = 0.5 * (b - a)
        pts = 0.5 * (a + b) + ref * half
        vals = _as_channels(g(pts), (len(pts),))
        if mask is not None:
            vals = vals * mask(pts)
        evals += len(pts)
        return (vals @ wref) * np.prod(half)

    def children(a, b):
        mid = 0.5 * (a + b)
        out = []
        for bits in itertools.product((0, 1), repeat=dim):
            bits = np.array(bits)
            ca = np.where(bits, mid, a)
            cb = np.where(bits, b, mid)
            out.append((ca, cb))
        return out

    counter = itertools.count()

    def entry(a, b, whole=None):
        if whole is None:
            whole = cell(a, b)
        kids = [(ca, cb, cell(ca, cb)) for ca, cb in children(a, b)]
        refined = sum(k[2] for k in kids)
        err = float(np.max(np.abs(refined - whole)))
        return (-err, next(counter), a, b, refined, kids)

    heap = [entry(lo, hi)]
    done = []
    total_err = -heap[0][0]
    status = "ok"
    while total_err > tol and heap:
        if len(heap) + len(done) >= max_cells:
            status = "budget-exceeded"
            break
        negerr, _, a, b, val, kids = heapq.heappop(heap)
        total_err += negerr
        if np.max(b - a) < min_width:
            done.append((negerr, next(counter), a, b, val, kids))
            total_err -= negerr
            status = "budget-exceeded"
            continue
        for ca, cb, cv in kids:
            e = entry(ca, cb, cv)
            heapq.heappush(heap, e)
            total_err += -e[0]
    entries = sorted(heap + done, key=lambda e: tuple(e[2]))
    value = sum(e[4] for e in entries)
    err = float(sum(-e[0] for e in entries))
    return QuadResult(np.atleast_1d(value), err, evals, status, len(entries))


# --------------------------------------------------------------------------------------
# pairing integrands


def _lam_column(lam):
    if lam is None:
        return np.zeros((1, 1))
    arr = np.atleast_1d(np.asarray(lam, dtype=complex))
    return arr.reshape(-1, 1)


def pairing_integrand(weight: PowerLogExpr | None, form: TestForm, lam=None,
                      guard: float = SINGULARITY_GUARD) -> Integrand:
    """``z -> weight(z; lam) * phi(z) * (-2i)^d`` for a one-variable form."""
    if form.d != 1:
        raise ValueError("pairing_integrand handles one complex variable; use nested_product_integrate")
    h = form.holo[0]
    lamc = _lam_column(lam)
    factor = pairing_factor(1)

    def g(z: np.ndarray) -> np.ndarray:
        shape = z.shape
        zf = z.ravel()
        phi = form.evaluate({h: zf})
        out = np.zeros((lamc.shape[0], zf.size), dtype=complex)
        nz = phi != 0
        if weight is None:
            out[:, nz] = phi[nz]
        elif nz.any():
            w = weight.evaluate({h: zf[nz]}, lamc, guard)
            out[:, nz] = np.broadcast_to(w, (lamc.shape[0], int(nz.sum()))) * phi[nz]
        return (out * factor).reshape((lamc.shape[0],) + shape)

    return g


def _monomial_exps(p: Poly, h: str, hb: str):
    ih, ib = p.index(h), p.index(hb)
    others = [i for i, v in enumerate(p.vars) if i not in (ih, ib)]
    return ih, ib, others


def angular_average(weight: PowerLogExpr | None, form: TestForm, lam=None):
    """Exact ``theta``-average of ``weight * phi * (-2i)`` as a function of ``rho``, or None.

    Applies when the form's disk is centered at 0 and every power carrier and
    log argument of the weight is a monomial in the coordinate, with equal
    lambda multiplicities on both sides.  A monomial ``z^A zbar^B`` averages to
    ``rho^(A+B)`` if ``A = B`` and to exactly 0 otherwise, so symmetric
    cancellations come out as exact zeros.  The result is ``2 pi`` times the
    average, i.e. ``int_0^{2pi} (...) d theta``.
    """
    if form.d != 1 or form.centers[0] != 0:
        return None
    h = form.holo[0]
    hb = conj_name(h)
    lamc = _lam_column(lam)
    C = lamc.shape[0]
    r2 = float(form.radii[0]) ** 2
    factor = pairing_factor(1) * 2 * np.pi
    # form monomials: (A, B, n) -> coefficient
    fterms = []
    for ns, p in form.terms.items():
        ih, ib, others = _monomial_exps(p, h, hb)
        for e, c in p.terms.items():
            if any(e[i] for i in others):
                return None
            fterms.append((e[ih], e[ib], ns[0], complex(c)))
    # weight terms: (A, B, lam_power, log factors, coefficient vector over channels)
    wterms = []
    if weight is None:
        wterms.append((0, 0, 0, (), 0.0, np.ones(C, dtype=complex)))
    else:
        for f, mh, a, ma, b, logs, R in weight._items():
            if not R.den.is_monomial():
                return None
            dexp, dc = R.den.leading()
            A0 = B0 = 0
            lam_pow = 0
            cfac = 1.0 + 0j
            log_abs_c = 0.0
            if f is not None:
                if not f.is_poly() or not f.num.is_monomial() or mh != ma or a.im or b.im:
                    return None
                fe, fc = f.num.leading()
                fc = fc / f.den.constant_value()
                ih, ib, others = _monomial_exps(f.num, h, hb)
                if fe[ib] or any(fe[i] for i in others):
                    return None
                k = fe[ih]
                if (a.re.denominator != 1) or (b.re.denominator != 1):
                    return None
                ai, bi = int(a.re), int(b.re)
                A0 += k * ai
                B0 += k * bi
                lam_pow = 2 * k * mh
                cf = complex(fc)
                cfac = cf ** ai * np.conj(cf) ** bi
                log_abs_c = 2 * mh * np.log(abs(cf))
            logspec = []
            for g, q in logs:
                if not g.is_poly() or not g.num.is_monomial():
                    return None
                ge, gc = g.num.leading()
                gc = gc / g.den.constant_value()
                ih, ib, others = _monomial_exps(g.num, h, hb)
                if any(ge[i] for i in others):
                    return None
                logspec.append((ge[ih] + ge[ib], float(np.log(abs(complex(gc)) ** 2)), q))
            ih, ib, others = _monomial_exps(R.num, h, hb)
            dih, dib, _ = _monomial_exps(R.den, h, hb)
            inv_dc = 1 / complex(dc)
            for e, c in R.num.terms.items():
                env = {R.vars[i]: 1.0 for i in others}
                if "lam" in R.vars:
                    env["lam"] = lamc[:, 0]
                mono = Poly.monomial(R.vars, {R.vars[i]: e[i] for i in others}, c)
                coef = np.broadcast_to(np.asarray(mono.evaluate(env), dtype=complex), (C,)) * inv_dc * cfac
                A = A0 + e[ih] - dexp[dih]
                B = B0 + e[ib] - dexp[dib]
                wterms.append((A, B, lam_pow, tuple(logspec), log_abs_c, coef))
    # pair up zero modes
    groups: dict = {}
    for A, B, lp, logspec, lac, coef in wterms:
        for fa, fb, n, fcoef in fterms:
            if A + fa != B + fb:
                continue
            key = (A + fa + B + fb, n, lp, logspec, lac)
            groups[key] = groups.get(key, 0) + coef * fcoef
    groups = {k: v for k, v in groups.items() if np.any(v != 0)}

    def radial(rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        out = np.zeros((C, rho.size), dtype=complex)
        if not groups:
            return out
        t = rho ** 2 / r2
        inside = t < 1
        if not inside.any():
            return out
        ri = rho[inside]
        u = 1.0 / (1.0 - t[inside])
        lr = np.log(ri)
        acc = np.zeros((C, ri.size), dtype=complex)
        for (D, n, lp, logspec, lac), coef in groups.items():
            ex = D * lr + n * np.log(u) - u
            term = np.exp(ex)[None, :] * coef[:, None]
            if lp:
                term = term * np.exp(lamc * (lp * lr[None, :] + lac))
            for deg, lc, q in logspec:
                term = term * (2 * deg * lr + lc)[None, :] ** q
            acc = acc + term
        out[:, inside] = acc * factor
        return out

    return radial


def weight_expr(f: Poly, N: int = 0, q: int = 0, coeff=None) -> PowerLogExpr:
    """``coeff * |f|^(2 lam) f^(-N) (log|f|^2)^q`` over ``f``'s universe."""
    F = RatField(f.vars)
    c = 1 if coeff is None else coeff
    return PowerLogExpr.abs_power(F, F.coerce(f), N=N, q=q, coeff=F.coerce(c))


def _engine_for(f: Poly, form: TestForm):
    if form.d == 1:
        md = monomial_degree(f, form.holo[0])
        if md is not None:
            return "polar", md
    return "box", None


def integrate_cutoff(f: Poly, weight: PowerLogExpr | None, xi: TestForm, eps: float,
                     lam=None, tol: float = DEFAULT_TOL, engine: str = "auto") -> QuadResult:
    """``int_{|f| >= eps} weight * xi`` under the pinned pairing convention."""
    res = sweep_values(f, weight, xi, [eps], lam=lam, tol=tol, engine=engine)
    return QuadResult(res[0][0], res[1][0], res[3], res[2])


def sweep_values(f: Poly, weight, xi: TestForm, eps_list, lam=None, tol: float = DEFAULT_TOL,
                 engine: str = "auto"):
    kind, md = _engine_for(f, xi)
    if engine != "auto":
        if engine.startswith("polar") and kind != "polar":
            raise ValueError("polar engine needs f = c*z^k in one variable")
        kind = "polar" if engine.startswith("polar") else engine
    if kind == "polar":
        c, k = md
        rho_max = xi.max_modulus_extent(0)
        radial = angular_average(weight, xi, lam) if engine != "polar-trapezoid" else None
        g = None if radial is not None else pairing_integrand(weight, xi, lam)
        vals, errs, status, evals = polar_sweep(g, k, abs(c), rho_max, eps_list, tol, radial=radial)
        return vals, errs, status, evals
    return _box_sweep(f, weight, xi, eps_list, lam, tol)


def _box_sweep(f: Poly, weight, xi: TestForm, eps_list, lam, tol):
    lamc = _lam_column(lam)
    holo = xi.holo
    d = len(holo)
    factor = pairing_factor(d)
    lo = []
    hi = []
    for (x0, x1, y0, y1) in xi.support_box():
        lo += [x0, y0]
        hi += [x1, y1]

    def to_env(pts):
        env = {}
        for j, h in enumerate(holo):
            z = pts[:, 2 * j] + 1j * pts[:, 2 * j + 1]
            env[h] = z
            env[conj_name(h)] = np.conj(z)
        return env

    vals, errs = [], []
    status = "ok"
    evals = 0
    for eps in eps_list:
        def mask(pts, eps=eps):
            return np.abs(f.evaluate(to_env(pts))) >= max(eps, TAIL_FLOOR)

        def g(pts):
            env = to_env(pts)
            phi = xi.evaluate({h: env[h] for h in holo})
            out = np.zeros((lamc.shape[0], len(pts)), dtype=complex)
            ok = (phi != 0) & mask(pts)
            if weight is None:
                out[:, ok] = phi[ok]
            elif ok.any():
                sub = {h: env[h][ok] for h in holo}
                w = weight.evaluate(sub, lamc)
                out[:, ok] = np.broadcast_to(w, (lamc.shape[0], int(ok.sum()))) * phi[ok]
            return out * factor

        res = box_integrate(g, lo, hi, mask=None, tol=tol, order=8 if d == 1 else 5,
                            max_cells=20000 if d == 1 else 3000)
        vals.append(res.value)
        errs.append(res.error)
        evals += res.evaluations
        if res.status != "ok":
            status = res.status
    return vals, errs, status, evals


# --------------------------------------------------------------------------------------
# sweeps


def geometric_grid(eps0: float = 0.5, ratio: float = 0.75, count: int = 24) -> list[float]:
    if not (0 < ratio < 1) or eps0 <= 0 or count < 1:
        raise ValueError("geometric grid needs eps0 > 0, 0 < ratio < 1, count >= 1")
    return [eps0 * ratio ** i for i in range(count)]


@dataclass
class CutoffSweep:
    eps: list
    values: list
    errors: list
    meta: dict = field(default_factory=dict)
    status: str = "ok"

    def __post_init__(self):
        for a, b in zip(self.eps, self.eps[1:]):
            if not b < a:
                raise ValueError("sweep eps must be strictly decreasing")

    def channel(self, i: int = 0) -> np.ndarray:
        return np.array([complex(np.atleast_1d(v)[i]) for v in self.values])

    def to_csv(self, channel: int = 0) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["eps", "re", "im", "err"])
        for e, v, er in zip(self.eps, self.channel(channel), self.errors):
            w.writerow([repr(float(e)), repr(float(v.real)), repr(float(v.imag)), repr(float(er))])
        return buf.getvalue()


def sweep(f: Poly, weight, xi: TestForm, eps_grid, lam=None, tol: float = DEFAULT_TOL,
          meta: dict | None = None) -> CutoffSweep:
    eps_grid = list(eps_grid)
    vals, errs, status, _ = sweep_values(f, weight, xi, eps_grid, lam=lam, tol=tol)
    return CutoffSweep(eps_grid, vals, errs, dict(meta or {}), status)


# --------------------------------------------------------------------------------------
# boundary circle


def integrate_boundary(N: int, psi: TestForm, eps: float, nodes: int = 256, alpha=0.0,
                       kind: str = "dzbar", with_scale: bool = False):
    """``int_{|z| = eps} |z|^(2 alpha) z^(-N) psi`` counterclockwise.

    ``kind="dzbar"``: ``psi = g dzbar`` (a (0,1)-form, ``dzbar = -i eps e^{-i theta} d theta``).
    ``kind="dtheta"``: ``psi = g d theta``.
    With ``with_scale`` also returns ``int |integrand| d theta``, the size that
    sets the roundoff level of the sum.
    """
    if psi.d != 1:
        raise ValueError("boundary integrals are implemented on the circle |z| = eps")
    theta = 2 * np.pi * np.arange(nodes) / nodes
    z = eps * np.exp(1j * theta)
    g = psi.evaluate({psi.holo[0]: z})
    vals = g * z ** (-N) * eps ** (2 * alpha)
    if kind == "dzbar":
        vals = vals * (-1j * eps * np.exp(-1j * theta))
    elif kind != "dtheta":
        raise ValueError("kind must be 'dzbar' or 'dtheta'")
    value = complex(vals.mean() * 2 * np.pi)
    if with_scale:
        return value, float(np.abs(vals).mean() * 2 * np.pi)
    return value


# --------------------------------------------------------------------------------------
# products


def _factor_form_key(form: TestForm) -> str:
    import json

    return json.dumps(form.to_json(), sort_keys=True)


def nested_product_integrate(factors, xi: TestForm, eps_vector, lam=None,
                             tol: float = DEFAULT_TOL) -> QuadResult:
    """Fubini evaluation of ``<T_1 x ... x T_n, xi>``.

    ``factors`` is a list of ``(f_i, weight_i)`` with ``f_i`` a one-variable Poly
    in coordinate ``xi.holo[i]`` and ``weight_i`` an expression over the same
    one-variable universe (or None for weight 1).  ``eps_vector`` is a list of
    cutoffs, or a list of equal-length eps lists for a diagonal sweep (then the
    value is a list).  Each test-form monomial factorizes, so the inner pairing
    is evaluated once per distinct one-variable factor and reused.
    """
    if len(factors) != xi.d:
        raise ValueError("one factor per coordinate of the test form")
    sweep_mode = isinstance(eps_vector[0], (list, tuple, np.ndarray))
    grids = [list(e) if sweep_mode else [e] for e in eps_vector]
    pieces = xi.separate()
    cache: dict = {}
    status = "ok"
    err_acc = None
    total = None
    evals = 0
    for coef, forms in pieces:
        prod = None
        prod_err = None
        for i, (form_i, (f_i, w_i)) in enumerate(zip(forms, factors)):
            key = (i, _factor_form_key(form_i))
            if key not in cache:
                vals, errs, st, ev = sweep_values(f_i, w_i, form_i, grids[i], lam=lam, tol=tol / max(1, len(pieces)))
                cache[key] = (np.array(vals), np.array(errs))
                evals += ev
                if st != "ok":
                    status = st
            v, e = cache[key]
            if prod is None:
                prod, prod_err = v, e[:, None] * np.ones_like(np.abs(v))
            else:
                prod_err = np.abs(prod) * e[:, None] + np.abs(v) * prod_err + prod_err * e[:, None]
                prod = prod * v
        term = coef * prod
        total = term if total is None else total + term
        err_acc = abs(coef) * prod_err if err_acc is None else err_acc + abs(coef) * prod_err
    if total is None:
        n = len(grids[0])
        total = np.zeros((n, _lam_column(lam).shape[0]), dtype=complex)
        err_acc = np.zeros(total.shape)
    if sweep_mode:
        return QuadResult(list(total), [float(np.max(e)) for e in err_acc], evals, status)
    return QuadResult(total[0], float(np.max(err_acc[0])), evals, status)


def one_variable_factor(name: str, power: int = 1) -> Poly:
    return Poly.monomial(universe(name), {name: power})
