"""The ten acceptance criteria, one test each.

Every test records a PASS/FAIL line that is echoed in the terminal summary.
Reference values come from tests/oracles.py (sympy and scipy only).
"""

import time
from fractions import Fraction

import numpy as np

import oracles
from pvext.expansion import fiber_expansion
from pvext.regularize import (boundary_decay_check, compare_T_S, delta_constant, finite_part,
                              formal_action_check, laurent_coeffs, vector_field)
from pvext.symbolic import GaussRat, universe
from pvext.symfun import (SymContext, footnote_identity, pushforward_field_check,
                          trace_annihilation_check, xdist_annihilation_check)
from pvext.testform import make_bump, named_form
from pvext.weyl import catalog, certify_iterate, lookup, verify_bernstein

Z = lookup("z")


def test_criterion_01_bernstein_certificates(record):
    t = time.perf_counter()
    data = catalog()
    base = {name: verify_bernstein(d).passed for name, d in data.items()}
    iterates = {(name, M): certify_iterate(d, M).passed for name, d in data.items() for M in range(1, 6)}
    elapsed = time.perf_counter() - t
    required = {"z", "z^2", "z^3", "z^4", "z1*z2", "z1^2+z2^2"}
    ok = required <= set(data) and all(base.values()) and all(iterates.values()) and elapsed < 10
    record(1, ok, f"{sum(base.values())}/{len(base)} data, {sum(iterates.values())}/{len(iterates)} "
                  f"iterates exact, {elapsed:.2f}s")
    assert ok


def test_criterion_02_T_equals_S(record):
    worst, slowest, failures = 0.0, 0.0, []
    for form in ("radial", "nonradial"):
        xi = named_form(form)
        for alpha in (0, 0.3, 0.5 + 0.25j):
            for N in (0, 1, 2):
                for q in (0, 1):
                    t = time.perf_counter()
                    r = compare_T_S(Z, alpha, N, q, xi)
                    dt = time.perf_counter() - t
                    slowest = max(slowest, dt)
                    worst = max(worst, r.rel_discrepancy)
                    if not (r.rel_discrepancy <= 1e-4 and dt < 120):
                        failures.append((form, alpha, N, q, r.rel_discrepancy, dt))
    ok = not failures
    record(2, ok, f"36 cases, worst rel {worst:.2e}, slowest {slowest:.1f}s"
                  + (f", failing {failures}" if failures else ""))
    assert ok


def test_criterion_03_product(record):
    t = time.perf_counter()
    d = lookup("z1*z2")
    reports = [compare_T_S(d, 0.3, N, 0, named_form(form, ("z1", "z2")))
               for form in ("radial", "nonradial") for N in (0, 1)]
    elapsed = time.perf_counter() - t
    worst = max(r.rel_discrepancy for r in reports)
    ok = worst <= 1e-3 and elapsed < 600
    record(3, ok, f"z1*z2 at alpha 3/10, worst rel {worst:.2e}, {elapsed:.1f}s")
    assert ok


def test_criterion_04_finite_part(record):
    alpha = -1.3
    r = finite_part(Z, alpha, 0, named_form("radial"))
    oracle = oracles.finite_part("radial", alpha)
    exp_err = abs(r.uncorrected_exponent - (2 * alpha + 2))
    rel = abs(r.value - oracle) / abs(oracle)
    ok = exp_err <= 1e-2 and rel <= 1e-4
    record(4, ok, f"divergence exponent {r.uncorrected_exponent:.4f} (target -0.6), "
                  f"finite part rel {rel:.2e}")
    assert ok


def test_criterion_05_boundary_vanishing(record):
    bumps = {
        "offset": named_form("offset"),
        "generic": make_bump(("z",), [Fraction(1, 10)], [1], "1 + z + z^2 + z^3 + z^4*zb + zb^2"),
        "off-axis": make_bump(("z",), [GaussRat(Fraction(-1, 4), Fraction(1, 3))], [Fraction(6, 5)],
                              "1 + zb + z*zb/2"),
    }
    slopes = {}
    for name, psi in bumps.items():
        for N in (0, 1, 2):
            r = boundary_decay_check(N, psi)
            slopes[(name, N)] = r["slope"] if r["status"] == "ok" else None
    ok = all(s is not None and s > 0 for s in slopes.values())
    low = min((s for s in slopes.values() if s is not None), default=float("nan"))
    record(5, ok, f"9 fits (3 bumps x N=0,1,2), smallest slope {low:.3f}")
    assert ok


def test_criterion_06_laurent(record):
    xi = named_form("radial")
    L = laurent_coeffs(Z, -1, 0, xi)
    scale = L.scale()
    higher = max(abs(L.P(k)) for k in range(2, L.pole_order_cap + 3))
    oracle = oracles.residue_at_minus_one("radial")
    rel = abs(L.P(1) - oracle) / abs(oracle)
    ok = higher <= 1e-6 * scale and rel <= 1e-4
    record(6, ok, f"max |P_k|/scale for k>=2 {higher / scale:.2e}, residue rel {rel:.2e}")
    assert ok


def test_criterion_07_fiber_expansion(record):
    worst, lattice_ok, invariant_ok = 0.0, True, True
    for name in ("radial", "nonradial", "wide"):
        model = fiber_expansion(2, named_form(name), order=2)
        ref = oracles.fiber_theta_coefficients(name, 2, 2)
        keys = {(t.r, t.m, t.m_prime) for t in model.terms} | set(ref)
        worst = max(worst, max(abs(model.coefficient(*k) - ref.get(k, 0)) for k in keys))
        lattice_ok &= model.exponents() <= {Fraction(0), Fraction(1, 2)}
        try:
            model.check_invariant()
        except ValueError:
            invariant_ok = False
        invariant_ok &= model.diagnostics["forbidden_log_max"] <= 1e-6 * model.diagnostics["value_scale"]
    ok = lattice_ok and invariant_ok and worst <= 1e-6
    record(7, ok, f"lattice in {{0, 1/2}}: {lattice_ok}, max oracle gap {worst:.2e}, invariant: {invariant_ok}")
    assert ok


def test_criterion_08_formal_action(record):
    U = universe("z")
    xi = named_form("nonradial")
    rels = {}
    for label, coeff in (("d", "1"), ("z d", "z")):
        for alpha in (0.3, 0.7):
            r = formal_action_check(Z, alpha, 0, vector_field(U, {"z": coeff}), xi)
            rels[(label, alpha)] = r["rel_discrepancy"]
    worst = max(rels.values())
    ok = worst <= 1e-3
    record(8, ok, f"4 cases, worst rel {worst:.2e}")
    assert ok


def test_criterion_09_symbolic_certificates(record):
    t = time.perf_counter()
    ctx = SymContext(2)
    certs = [pushforward_field_check(ctx, w) for w in (-1, 0, 1)]
    certs.append(trace_annihilation_check(ctx, 8))
    certs.append(footnote_identity(ctx, 8))
    certs.append(xdist_annihilation_check(1))    # includes U_-1 X_1 = 0
    certs.append(xdist_annihilation_check("G"))  # the ideal and U_0 - lam on X_lam
    elapsed = time.perf_counter() - t
    ok = all(c.passed for c in certs) and elapsed < 60
    record(9, ok, f"{sum(c.passed for c in certs)}/{len(certs)} exact certificates, {elapsed:.2f}s")
    assert ok


def test_criterion_10_delta_constant(record):
    r = delta_constant(named_form("radial"))
    c = r["c"]
    oracle = oracles.delta_pairing("radial") / r["phi0"]
    ok = abs(c.real) <= 1e-4 and abs(abs(c) - 2 * np.pi) <= 1e-4 and abs(c - oracle) <= 1e-4
    record(10, ok, f"c = {c.real:.2e} + {c.imag:.6f}i, |c| - 2pi = {abs(c) - 2 * np.pi:.2e}")
    assert ok
