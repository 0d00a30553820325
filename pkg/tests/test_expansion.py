from fractions import Fraction

import numpy as np
import pytest

import oracles
from pvext.expansion import (ExpansionModel, ExpansionTerm, fiber_expansion, fiber_values,
                             lattice, ray_count, taylor_coefficients)
from pvext.symbolic import Poly, universe
from pvext.testform import named_form

V = universe("z", lam=False)


def test_smooth_case_reproduces_taylor_data():
    xi = named_form("nonradial")
    model = fiber_expansion(1, xi, order=2)
    ref = oracles.taylor("nonradial", 2)
    for (a, b), v in ref.items():
        assert abs(model.coefficient(0, a, b) - v) <= 1e-6
    assert model.exponents() == {Fraction(0)}


def test_abs_square_on_double_cover():
    model = fiber_expansion(2, Poly.parse("z*zb", V), order=2)
    assert abs(model.coefficient(Fraction(1, 2), 0, 0) - 2) <= 1e-9
    for t in model.terms:
        if (t.r, t.m, t.m_prime) != (Fraction(1, 2), 0, 0):
            assert abs(t.coefficient) <= 1e-9


def test_odd_function_cancels_over_roots():
    model = fiber_expansion(2, Poly.parse("z", V), order=2)
    assert all(abs(t.coefficient) <= 1e-9 for t in model.terms)
    s = np.array([0.1 + 0.05j, -0.02j])
    assert np.all(np.abs(fiber_values(Poly.parse("z", V), 2, s)) < 1e-15)


@pytest.mark.parametrize("name", ["radial", "nonradial", "wide"])
def test_fitted_coefficients_match_sympy_oracle(name):
    model = fiber_expansion(2, named_form(name), order=2)
    ref = oracles.fiber_theta_coefficients(name, 2, 2)
    keys = {(t.r, t.m, t.m_prime) for t in model.terms} | set(ref)
    for key in keys:
        assert abs(model.coefficient(*key) - ref.get(key, 0)) <= 1e-6, key
    assert model.exponents() <= {Fraction(0), Fraction(1, 2)}


def test_taylor_coefficients_match_sympy():
    ref = oracles.taylor("offset", 4)
    got = taylor_coefficients(named_form("offset"), 4)
    for key in set(ref) | set(got):
        assert abs(got.get(key, 0) - ref.get(key, 0)) <= 1e-12 * max(1, abs(ref.get(key, 0)))


def test_forbidden_logs_not_detected():
    model = fiber_expansion(2, named_form("nonradial"), order=2)
    assert model.diagnostics["forbidden_log_max"] <= 1e-6 * model.diagnostics["value_scale"]


def test_structural_invariant_enforced():
    with pytest.raises(ValueError):
        ExpansionModel(2, 2, "theta", [ExpansionTerm(Fraction(0), 0, 1, 1, 1.0)])
    ExpansionModel(2, 2, "theta", [ExpansionTerm(Fraction(0), 1, 1, 1, 1.0)])


def test_lattice_and_rays():
    pts = lattice(2, 2)
    assert (Fraction(1, 2), 0, 0) in pts
    assert all(2 * r + m + mp <= 2 for r, m, mp in pts)
    for order in range(1, 10):
        n = ray_count(order)
        assert n % 4 == 0 and n >= 2 * order + 1


def test_model_evaluation_tracks_fiber_sums():
    xi = named_form("nonradial")
    model = fiber_expansion(2, xi, order=4)
    s = 1e-3 * np.exp(1j * np.linspace(0, 2 * np.pi, 7))
    exact = fiber_values(xi, 2, s)
    assert np.max(np.abs(model.evaluate(s) - exact)) <= 1e-6 * np.max(np.abs(exact))
