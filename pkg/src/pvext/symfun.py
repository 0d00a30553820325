"""Symmetric functions of k roots: the ideal of trace functions, the U fields,
and exact checks of the distributions built from ``|z_j|^(2 lam)``.

Coordinates upstairs are ``z1..zk``; downstairs ``s1..sk`` are the elementary
symmetric functions (``sb1..sbk`` their conjugates).  For k = 2 the roots are
expressed on the smooth locus through ``sqrt(Delta)`` with
``Delta = s1^2 - 4 s2`` and, independently, ``sqrt(conj Delta)``, so every
identity below is checked as an exact zero in that radical extension.
Ideal membership is certified on power sums only (a surrogate: a failure is
conclusive, a pass is evidence).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .symbolic import GaussRat, Poly, PowerLogExpr, SqrtField, universe
from .testform import TestForm, apply_adjoint, make_bump
from .weyl import Certificate, DiffOperator

CHECKS = ("pushforward", "trace-annihilation", "footnote-identity", "commutator", "xdist",
          "conjugate-generators", "shifted-coordinates", "newton", "pairing", "k3-numeric")


def _apply_poly(P: DiffOperator, p: Poly) -> Poly:
    out = Poly.zero(p.vars)
    for alpha, c in P.terms.items():
        q = p
        for v, k in zip(P.dvars, alpha):
            for _ in range(k):
                q = q.diff(v)
        out = out + c * q
    return out


class SymContext:
    """Elementary symmetric functions, power sums and the sigma-side operators for k roots."""

    def __init__(self, k: int):
        if not 2 <= k <= 3:
            raise ValueError("k must be 2 or 3")
        self.k = k
        self.zholo = tuple(f"z{j}" for j in range(1, k + 1))
        self.sholo = tuple(f"s{h}" for h in range(1, k + 1))
        self.zvars = universe(*self.zholo, lam=False)
        self.svars = universe(*self.sholo)

    # polynomials ---------------------------------------------------------------
    @cached_property
    def sigma(self) -> list[Poly]:
        """``sigma_h`` in the z variables, h = 1..k."""
        zs = [Poly.var(self.zvars, z) for z in self.zholo]
        out = []
        for h in range(1, self.k + 1):
            acc = Poly.zero(self.zvars)
            for combo in itertools.combinations(zs, h):
                term = Poly.const(self.zvars, 1)
                for z in combo:
                    term = term * z
                acc = acc + term
            out.append(acc)
        return out

    def s(self, h: int) -> Poly:
        if 1 <= h <= self.k:
            return Poly.var(self.svars, f"s{h}")
        return Poly.zero(self.svars)

    @cached_property
    def discriminant(self) -> Poly:
        zs = [Poly.var(self.zvars, z) for z in self.zholo]
        out = Poly.const(self.zvars, 1)
        for i, j in itertools.combinations(range(self.k), 2):
            out = out * (zs[i] - zs[j]) ** 2
        return out

    def power_sum_z(self, m: int) -> Poly:
        acc = Poly.zero(self.zvars)
        for z in self.zholo:
            acc = acc + Poly.var(self.zvars, z) ** m
        return acc

    def power_sum(self, m: int) -> Poly:
        """``p_m`` in the sigma variables via Newton's identities."""
        cache = self._newton
        while len(cache) <= m:
            n = len(cache)
            if n == 0:
                cache.append(Poly.const(self.svars, self.k))
                continue
            acc = Poly.zero(self.svars)
            for i in range(1, n):
                acc = acc + (-1) ** (i - 1) * self.s(i) * cache[n - i]
            acc = acc + (-1) ** (n - 1) * n * self.s(n)
            cache.append(acc)
        return cache[m]

    @cached_property
    def _newton(self) -> list:
        return []

    def to_z(self, p: Poly) -> Poly:
        """Pull back a sigma polynomial (holomorphic variables only) along the root map."""
        mapping = {f"s{h}": self.sigma[h - 1] for h in range(1, self.k + 1)}
        used = p.variables_used()
        if used - set(mapping):
            raise ValueError("only holomorphic sigma variables can be pulled back")
        return p.reuniverse(self.sholo).compose(mapping, self.zvars)

    # operators -----------------------------------------------------------------
    def d(self, h: int) -> DiffOperator:
        if 1 <= h <= self.k:
            return DiffOperator.partial(self.svars, self.sholo, f"s{h}")
        return DiffOperator.zero(self.svars, self.sholo)

    def mul(self, c) -> DiffOperator:
        return DiffOperator.multiplication(self.svars, self.sholo, c)

    def field_op(self, coeffs: list[Poly]) -> DiffOperator:
        terms = {}
        for h, c in enumerate(coeffs):
            if not c.is_zero():
                terms[tuple(1 if i == h else 0 for i in range(self.k))] = c
        return DiffOperator(self.svars, self.sholo, terms)

    @cached_property
    def E(self) -> DiffOperator:
        return self.field_op([self.s(h) for h in range(1, self.k + 1)])

    def A(self, p: int, q: int) -> DiffOperator:
        return self.d(p).compose(self.d(q)) - self.d(p + 1).compose(self.d(q - 1))

    def T(self, m: int) -> DiffOperator:
        return self.d(1).compose(self.d(m - 1)) + self.d(m).compose(self.E)

    def ideal_generators(self) -> dict[str, DiffOperator]:
        gens = {}
        for p in range(1, self.k):
            for q in range(2, self.k + 1):
                gens[f"A[{p},{q}]"] = self.A(p, q)
        for m in range(2, self.k + 1):
            gens[f"T^{m}"] = self.T(m)
        return gens

    @cached_property
    def U(self) -> dict[int, DiffOperator]:
        k = self.k
        u_m1 = [Poly.const(self.svars, k)] + [(k - h) * self.s(h) for h in range(1, k)]
        u_0 = [h * self.s(h) for h in range(1, k + 1)]
        u_1 = [self.s(1) * self.s(h) - (h + 1) * self.s(h + 1) for h in range(1, k + 1)]
        return {-1: self.field_op(u_m1), 0: self.field_op(u_0), 1: self.field_op(u_1)}

    def V(self, which: int) -> list[Poly]:
        """Coefficients of ``V_which = sum z_j^(which+1) d_{z_j}``."""
        return [Poly.var(self.zvars, z) ** (which + 1) for z in self.zholo]


# --------------------------------------------------------------------------------------
# polynomial certificates


def pushforward_field_check(ctx: SymContext, which: int) -> Certificate:
    """``V(sigma_h o pi) = (U sigma_h) o pi`` for every h."""
    U = ctx.U[which]
    Vc = ctx.V(which)
    residuals = []
    for h in range(1, ctx.k + 1):
        lhs = Poly.zero(ctx.zvars)
        for z, c in zip(ctx.zholo, Vc):
            lhs = lhs + c * ctx.sigma[h - 1].diff(z)
        rhs = ctx.to_z(_apply_poly(U, ctx.s(h)))
        r = lhs - rhs
        if not r.is_zero():
            residuals.append(f"h={h}: {r}")
    return Certificate(f"pushforward[U{which}, k={ctx.k}]", not residuals,
                       "; ".join(residuals) or "0", {"U": str(U)})


def trace_annihilation_check(ctx: SymContext, m_max: int = 8) -> Certificate:
    """Every generator of the ideal kills every power sum ``p_m``, ``m <= m_max``."""
    if m_max < ctx.k:
        raise ValueError("m_max must be at least k")
    bad = []
    for name, G in ctx.ideal_generators().items():
        for m in range(1, m_max + 1):
            r = _apply_poly(G, ctx.power_sum(m))
            if not r.is_zero():
                bad.append(f"{name}(p_{m}) = {r}")
    return Certificate(f"trace-annihilation[k={ctx.k}, m<={m_max}]", not bad, "; ".join(bad) or "0",
                       {"generators": list(ctx.ideal_generators())})


def operator_identity_on_traces(ctx: SymContext, lhs: DiffOperator, rhs: DiffOperator,
                                m_max: int = 8, name: str = "identity") -> Certificate:
    """``(lhs - rhs)(p_m) = 0`` for ``m <= m_max`` (membership surrogate modulo the ideal)."""
    D = lhs - rhs
    bad = []
    for m in range(1, m_max + 1):
        r = _apply_poly(D, ctx.power_sum(m))
        if not r.is_zero():
            bad.append(f"p_{m}: {r}")
    return Certificate(f"{name}[k={ctx.k}, m<={m_max}]", not bad, "; ".join(bad) or "0",
                       {"difference": str(D)})


def footnote_identity(ctx: SymContext, m_max: int = 8) -> Certificate:
    U = ctx.U
    one = DiffOperator.identity(ctx.svars, ctx.sholo)
    return operator_identity_on_traces(ctx, U[-1].compose(U[1]), (U[0] + one).compose(U[0]), m_max,
                                       "U-1 U1 = (U0+1) U0")


def commutator_report(ctx: SymContext, m_max: int = 8) -> dict:
    """The commutator ``[U_-1, U_1]`` as computed, compared with ``2 U_0``."""
    U = ctx.U
    comm = U[-1].compose(U[1]) - U[1].compose(U[-1])
    cert = operator_identity_on_traces(ctx, comm, U[0].scale(2), m_max, "[U-1, U1] = 2 U0")
    return {"commutator": str(comm), "equals_2U0_exactly": comm == U[0].scale(2),
            "on_traces": cert.to_json()}


def shifted_coordinates_check(k: int) -> Certificate:
    """``Delta = prod x_h^2 prod (x_i - x_j)^2`` with ``x_1 = z_1``, ``x_h = z_h - z_1``."""
    ctx = SymContext(k)
    xs = tuple(f"x{j}" for j in range(1, k + 1))
    xvars = universe(*xs, lam=False)
    x = [Poly.var(xvars, v) for v in xs]
    mapping = {"z1": x[0]}
    for h in range(2, k + 1):
        mapping[f"z{h}"] = x[h - 1] + x[0]
    mapping.update({"zb1": Poly.var(xvars, "xb1")})
    for h in range(2, k + 1):
        mapping[f"zb{h}"] = Poly.var(xvars, f"xb{h}") + Poly.var(xvars, "xb1")
    lhs = ctx.discriminant.compose(mapping, xvars)
    rhs = Poly.const(xvars, 1)
    for h in range(1, k):
        rhs = rhs * x[h] ** 2
    for i, j in itertools.combinations(range(1, k), 2):
        rhs = rhs * (x[i] - x[j]) ** 2
    r = lhs - rhs
    return Certificate(f"shifted-coordinates[k={k}]", r.is_zero(), str(r),
                       {"x1_free": "x1" not in r.variables_used()})


def newton_roundtrip(ctx: SymContext, m_max: int = 8, rng: np.random.Generator | None = None,
                     n: int = 5) -> dict:
    """Exact: ``p_m(sigma(z))`` equals the power sum.  Numeric: evaluation at random roots."""
    rng = rng if rng is not None else np.random.default_rng(0)
    exact_ok = all((ctx.to_z(ctx.power_sum(m)) - ctx.power_sum_z(m)).is_zero() for m in range(m_max + 1))
    worst = 0.0
    for _ in range(n):
        roots = rng.normal(size=ctx.k) + 1j * rng.normal(size=ctx.k)
        coeffs = np.poly(roots)  # z^k - s1 z^(k-1) + s2 z^(k-2) ...
        env = {f"s{h}": (-1) ** h * coeffs[h] for h in range(1, ctx.k + 1)}
        for m in range(m_max + 1):
            direct = np.sum(roots ** m)
            via = complex(ctx.power_sum(m).evaluate(env))
            worst = max(worst, abs(via - direct) / max(1.0, abs(direct)))
    return {"exact": exact_ok, "numeric_max_rel": worst, "passed": exact_ok and worst <= 1e-10}


# --------------------------------------------------------------------------------------
# the k = 2 smooth locus


class SmoothLocus:
    """k = 2 roots ``z_{1,2} = (s1 +- sqrt(Delta)) / 2`` over Q(i)(s, sbar)[sqrt Delta, sqrt conj Delta]."""

    def __init__(self):
        self.ctx = SymContext(2)
        v = self.ctx.svars
        delta = Poly.parse("s1**2 - 4*s2", v)
        self.field = SqrtField(v, [delta, delta.conj()], conj_index=(1, 0))
        F = self.field
        r = F.sqrt(0)
        half = Fraction(1, 2)
        self.roots = [(F.var("s1") + r) * half, (F.var("s1") - r) * half]

    def expr(self, x) -> PowerLogExpr:
        return PowerLogExpr.from_element(self.field, self.field.coerce(x))

    def s(self, name: str):
        return self.field.var(name)

    def X(self, case) -> PowerLogExpr:
        """``X_lam`` for case "G" (symbolic lam) or lam = 1, 0, -1, as a sum over both roots."""
        F = self.field
        sb1 = F.var("sb1")
        out = PowerLogExpr.zero(F)
        for z in self.roots:
            zb = z.conj()
            if case == "G":
                out = out + PowerLogExpr.power(F, z, 0, 0)
            elif case == 1:
                out = out + self.expr(z * zb)
            elif case == 0:
                out = out + PowerLogExpr.log(F, z, 1, coeff=zb - sb1 * Fraction(1, 2))
            elif case == -1:
                out = out + self.expr((zb - sb1 * Fraction(1, 2)) / z)
            else:
                raise ValueError("case must be 'G', 1, 0 or -1")
        if case == 1:
            out = out - self.expr(F.var("s1") * sb1 * Fraction(1, 2))
        return out

    def lam_value(self, case):
        return None if case == "G" else case

    def annihilators(self, case) -> dict[str, DiffOperator]:
        """Generators of the ideal plus ``U_0 - lam`` (and ``U_-1`` in case 1)."""
        ctx = self.ctx
        ops = dict(ctx.ideal_generators())
        if case == "G":
            lam = Poly.var(ctx.svars, "lam")
        else:
            lam = Poly.const(ctx.svars, case)
        ops["U0 - lam"] = ctx.U[0] - ctx.mul(lam)
        if case == 1:
            ops["U-1"] = ctx.U[-1]
        return ops


def xdist_annihilation_check(case) -> Certificate:
    """Each annihilator of the case kills ``X_lam`` exactly on the smooth locus (k = 2)."""
    L = SmoothLocus()
    X = L.X(case)
    bad = []
    applied = []
    for name, Q in L.annihilators(case).items():
        r = Q.apply(X)
        applied.append(name)
        if not r.is_zero():
            bad.append(f"{name}: {r}")
    return Certificate(f"xdist[case={case}]", not bad, "; ".join(bad) or "0", {"operators": applied})


def _proportionality(lhs: PowerLogExpr, rhs: PowerLogExpr, probe: dict) -> Fraction | complex | None:
    """Exact constant c with ``lhs = c * rhs`` if one exists (found numerically, then certified)."""
    if rhs.is_zero():
        return Fraction(0) if lhs.is_zero() else None
    a = lhs.evaluate(probe)
    b = rhs.evaluate(probe)
    if b == 0:
        return None
    ratio = complex(a / b)
    c = Fraction(ratio.real).limit_denominator(1000)
    if abs(ratio.imag) > 1e-9:
        return None
    if (lhs - rhs.scale(lhs.field.const(GaussRat.coerce(c)))).is_zero():
        return c
    return None


def conjugate_generator_check() -> dict:
    """The complement identities for k = 2: derived constants next to the stated ones.

    Each entry computes the left side exactly and finds the constant c with
    ``lhs = c * rhs``.  Stated constants are recorded, not asserted.
    """
    L = SmoothLocus()
    F = L.field
    ctx = L.ctx
    k = 2
    U = ctx.U
    Ub = {j: U[j].conjugate() for j in U}
    one = DiffOperator.identity(ctx.svars, ("sb1", "sb2"))
    s1, s2, sb1, sb2 = (F.var(n) for n in ("s1", "s2", "sb1", "sb2"))
    probe = {"s1": 0.37 + 0.21j, "s2": -0.43 + 0.58j}
    sum_abs2 = PowerLogExpr.zero(F)
    Zm1 = PowerLogExpr.zero(F)
    inv_sum = PowerLogExpr.zero(F)
    for z in L.roots:
        sum_abs2 = sum_abs2 + L.expr(z * z.conj())
        Zm1 = Zm1 + L.expr(z.conj() / z)
        inv_sum = inv_sum + L.expr(z.inverse())
    Y = {1: L.expr(s1 / sb2), 0: L.expr(sb2.inverse()), -1: L.expr(s1 / s2)}
    X = {c: L.X(c) for c in (1, 0, -1)}
    entries = []

    def record(name, lhs, rhs, stated, rhs_label):
        c = _proportionality(lhs, rhs, probe)
        entries.append({
            "identity": name,
            "rhs": rhs_label,
            "stated_constant": str(stated),
            "derived_constant": None if c is None else str(c),
            "agrees": c is not None and Fraction(c) == Fraction(stated),
        })

    # Ubar_-1 Z_-1 = sum 1/z_j = sigma_{k-1}/sigma_k
    record("Ubar-1(Z-1)", Ub[-1].apply(Zm1), Y[-1], 1, "Y-1 = s1/s2")
    record("sum 1/z_j", inv_sum, Y[-1], 1, "Y-1 = s1/s2")
    # X_-1 = (1 - (sbar1/k) Ubar_-1) Z_-1
    op = one - DiffOperator.multiplication(ctx.svars, ("sb1", "sb2"), Poly.parse("sb1/2", ctx.svars)).compose(Ub[-1])
    record("(1 - sb1/k Ubar-1)(Z-1)", op.apply(Zm1), X[-1], 1, "X-1")
    # Ubar_0 on sum |z_j|^2
    record("Ubar0(sum |z|^2)", Ub[0].apply(sum_abs2), sum_abs2, 1, "sum |z|^2")
    # Z_1 under both readings of the subtracted term
    readings = {"sigma1/sigma_k": L.expr(s1 / s2), "sigma1/conj(sigma_k)": L.expr(s1 / sb2)}
    for label, sub in readings.items():
        Z1 = sum_abs2 - sub
        lhs = (Ub[0] - one).apply(Z1)
        record(f"(Ubar0 - 1)(Z1), Z1 = sum|z|^2 - {label}", lhs, Y[1], k - 1, "Y1 = s1/sb2")
        lhs2 = (Ub[0] + one.scale(k)).apply(Z1)
        rhs2 = X[1].scale(F.const(k + 1)) + L.expr(sb1 * sb2 * s1 / sb2 * Fraction(k + 1, k))
        record(f"(Ubar0 + k)(Z1), Z1 = sum|z|^2 - {label}", lhs2, rhs2, 1,
               "(k+1) X1 + (k+1)/k sb1 sb_k Y1")
    # X_0 + Y_0
    lhs = (Ub[0] - one).apply(X[0] + Y[0])
    record("(Ubar0 - 1)(X0 + Y0)", lhs, Y[0], -(k + 1), "Y0 = 1/sb2")
    lhs = (Ub[0] + one.scale(k)).apply(X[0] + Y[0])
    record("(Ubar0 + k)(X0 + 1/sb_k)", lhs, X[0], 1, "X0")
    return {"k": k, "entries": entries}


# --------------------------------------------------------------------------------------
# numerics


def sigma_test_form(centers=(0, 0), radii=(1, 1), p: str | None = None) -> TestForm:
    return make_bump(("s1", "s2"), list(centers), list(radii), p)


@dataclass
class PairingResult:
    value: complex
    scale: float
    relative: float
    samples: int
    seed: int
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json(self):
        return {"value": [self.value.real, self.value.imag], "scale": self.scale,
                "relative": self.relative, "samples": self.samples, "seed": self.seed,
                "passed": self.passed, **self.details}


def _x_lambda_values(z1, z2, lam):
    return np.abs(z1) ** (2 * lam) + np.abs(z2) ** (2 * lam)


def numeric_pairing_check(Q: DiffOperator, lam: float, xi: TestForm | None = None, seed: int = 0,
                          log2_samples: int = 18, tolerance: float = 0.05, cutoff: float = 0.0
                          ) -> PairingResult:
    """Quasi-Monte Carlo estimate of ``<pi_* X_lam, Q^* xi>`` computed upstairs (k = 2).

    The pullback of ``phi(s) ds ^ dsbar`` carries ``|z1 - z2|^2``; the pairing
    factor is common to both the value and the scale and is left out.  The
    scale is the same integral of absolute values.  ``cutoff`` removes the
    points with ``|s2 * Delta| < cutoff``.
    """
    from scipy.stats import qmc

    xi = xi if xi is not None else sigma_test_form()
    form = apply_adjoint(Q, xi, lam)
    r1 = float(max(abs(complex(c)) + float(r) for c, r in [(xi.centers[0], xi.radii[0])]))
    r2 = float(max(abs(complex(c)) + float(r) for c, r in [(xi.centers[1], xi.radii[1])]))
    B = r1 + np.sqrt(r2) + 1e-9  # every root of z^2 - s1 z + s2 lies in |z| <= B
    sampler = qmc.Sobol(4, scramble=True, seed=seed)
    u = sampler.random_base2(log2_samples)
    rad = B * np.sqrt(u[:, [0, 2]])
    ang = 2 * np.pi * u[:, [1, 3]]
    z = rad * np.exp(1j * ang)
    z1, z2 = z[:, 0], z[:, 1]
    s1 = z1 + z2
    s2 = z1 * z2
    phi = np.asarray(form.evaluate({"s1": s1, "s2": s2}), dtype=complex)
    weight = _x_lambda_values(z1, z2, lam) * np.abs(z1 - z2) ** 2
    if cutoff > 0:
        weight = np.where(np.abs(s2 * (s1 ** 2 - 4 * s2)) < cutoff, 0.0, weight)
    vol = (np.pi * B ** 2) ** 2
    value = complex(np.mean(weight * phi) * vol)
    scale = float(np.mean(np.abs(weight * phi)) * vol)
    rel = abs(value) / scale if scale > 0 else 0.0
    return PairingResult(value, scale, rel, len(z1), seed, rel <= tolerance,
                         {"lam": lam, "operator": str(Q), "bound": B})


def k3_numeric_checks(lam: complex = 0.5 + 0.2j, seed: int = 0, n: int = 5, h: float = 1e-3) -> dict:
    """k = 3 spot checks by finite differences: the ideal and ``U_0 - lam`` kill ``sum z_j^lam``."""
    ctx = SymContext(3)
    rng = np.random.default_rng(seed)
    gens = dict(ctx.ideal_generators())
    gens["U0 - lam"] = ctx.U[0]  # the -lam part is added below
    worst = 0.0
    done = 0
    while done < n:
        roots = rng.normal(size=3) + 1j * rng.normal(size=3) + 1.5  # keep away from the cut
        if np.min(np.abs(np.subtract.outer(roots, roots)) + np.eye(3)) < 0.3:
            continue
        s0 = np.array([roots.sum(), roots[0] * roots[1] + roots[0] * roots[2] + roots[1] * roots[2],
                       roots.prod()])

        def F(s):
            rts = np.roots([1, -s[0], s[1], -s[2]])
            return np.sum(np.exp(lam * np.log(rts)))

        def deriv(alpha):
            # central differences of order 4 along each sigma direction (F is holomorphic)
            stencil = [(-2, 1 / 12), (-1, -2 / 3), (1, 2 / 3), (2, -1 / 12)]
            pts = [(np.zeros(3, dtype=complex), 1.0)]
            for i, a in enumerate(alpha):
                for _ in range(a):
                    new = []
                    for off, w in pts:
                        for j, c in stencil:
                            e = np.zeros(3, dtype=complex)
                            e[i] = j * h
                            new.append((off + e, w * c / h))
                    pts = new
            return sum(w * F(s0 + off) for off, w in pts)

        for name, Q in gens.items():
            val = 0j
            for alpha, c in Q.terms.items():
                coef = complex(c.evaluate({"s1": s0[0], "s2": s0[1], "s3": s0[2], "lam": lam}))
                val += coef * deriv(alpha)
            if name == "U0 - lam":
                val -= lam * F(s0)
            worst = max(worst, abs(val) / max(1.0, abs(F(s0))))
        done += 1
    return {"lam": [complex(lam).real, complex(lam).imag], "max_residual": worst, "passed": worst < 1e-5,
            "generators": list(gens)}


def run_all(k: int = 2, m_max: int = 8) -> dict:
    """All symbolic certificates for k (k = 2 also gets the smooth-locus checks)."""
    ctx = SymContext(k)
    out = {"k": k, "certificates": []}
    certs = [pushforward_field_check(ctx, w) for w in (-1, 0, 1)]
    certs.append(trace_annihilation_check(ctx, m_max))
    certs.append(footnote_identity(ctx, m_max))
    certs.append(shifted_coordinates_check(k))
    if k == 2:
        certs += [xdist_annihilation_check(c) for c in ("G", 1, 0, -1)]
    out["certificates"] = [c.to_json() for c in certs]
    out["commutator"] = commutator_report(ctx, m_max)
    out["newton"] = newton_roundtrip(ctx, m_max)
    if k == 2:
        out["conjugate_generators"] = conjugate_generator_check()
    out["passed"] = all(c.passed for c in certs) and out["newton"]["passed"]
    return out
