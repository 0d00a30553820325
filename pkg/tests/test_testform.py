from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pvext.symbolic import GaussRat, Poly, PowerLogExpr, RatField, universe
from pvext.testform import FORM_NAMES, TestForm, apply_adjoint, make_bump, named_form
from pvext.weyl import DiffOperator, apply_op, lookup

V1 = universe("z", lam=False)


def grid(n=601, half=1.0, center=0j):
    x = np.linspace(-half, half, n)
    X, Y = np.meshgrid(x, x, indexing="ij")
    return center + X + 1j * Y, (x[1] - x[0]) ** 2


def test_bump_value_at_center():
    assert make_bump(("z",)).evaluate({"z": 0j}) == pytest.approx(np.exp(-1))


def test_value_on_support_boundary_is_zero():
    xi = make_bump(("z",), centers=[GaussRat(Fraction(1, 5))], radii=[Fraction(1, 2)], p="1+z*zb")
    th = np.linspace(0, 2 * np.pi, 50)
    pts = 0.2 + 0.5 * np.exp(1j * th)
    assert np.all(xi.evaluate({"z": pts}) == 0)


def test_polynomial_factor_at_center():
    c = GaussRat(Fraction(1, 5), Fraction(1, 10))
    xi = make_bump(("z",), centers=[c], p="z")
    assert xi.evaluate({"z": complex(c)}) == pytest.approx(complex(c) * np.exp(-1))


def test_outside_support_exactly_zero():
    xi = named_form("nonradial")
    far = np.array([1.0, 1.5j, -3 + 2j, 1 + 1e-12])
    assert np.all(xi.evaluate({"z": far}) == 0)


def test_conjugate_derivative_vanishes_at_center():
    xi = make_bump(("z",))
    assert abs(xi.diff("zb").evaluate({"z": 0j})) < 1e-15


def test_mixed_partials_exact():
    for name in FORM_NAMES:
        xi = named_form(name)
        assert xi.diff("z").diff("zb") == xi.diff("zb").diff("z")


def test_diff_side_mismatch_rejected():
    with pytest.raises(ValueError):
        make_bump(("z",)).diff("zb", side="holo")


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(FORM_NAMES), st.integers(0, 1000))
def test_derivatives_match_finite_differences(name, seed):
    xi = named_form(name)
    rng = np.random.default_rng(seed)
    c = complex(xi.centers[0])
    r = float(xi.radii[0])
    h = 1e-5
    for _ in range(10):
        z = c + 0.8 * r * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        fx = (xi(z + h) - xi(z - h)) / (2 * h)
        fy = (xi(z + 1j * h) - xi(z - 1j * h)) / (2 * h)
        dz = (fx - 1j * fy) / 2
        dzb = (fx + 1j * fy) / 2
        scale = max(abs(fx), abs(fy), 1e-3)
        assert abs(xi.diff("z")(z) - dz) <= 1e-6 * scale
        assert abs(xi.diff("zb")(z) - dzb) <= 1e-6 * scale


def test_sixth_order_derivatives_bounded():
    xi = named_form("nonradial")
    r = np.concatenate([np.linspace(0, 0.99, 60), 1 - np.logspace(-2, -8, 30)])
    pts = r * np.exp(0.7j)
    for a in range(7):
        form = xi.diff_multi(("z", "zb"), (a, 6 - a))
        vals = form.evaluate({"z": pts})
        assert np.all(np.isfinite(vals))
        assert np.max(np.abs(vals)) < 1e12


def test_adjoint_of_conjugate_derivative():
    xi = named_form("nonradial")
    P = DiffOperator.partial(universe("z"), ("zb",), "zb", 1)
    assert apply_adjoint(P, xi) == -xi.diff("zb")


def test_adjoint_of_identity():
    xi = named_form("offset")
    assert apply_adjoint(DiffOperator.identity(universe("z"), ("z",)), xi) == xi


def test_json_roundtrip():
    xi = named_form("offset")
    assert TestForm.from_json(xi.to_json()) == xi


@pytest.mark.parametrize("name", ["z", "z^2", "z^3"])
@pytest.mark.parametrize("side", ["holo", "anti"])
def test_integration_by_parts(name, side):
    d = lookup(name)
    lam = 0.3
    P = d.P if side == "holo" else d.P.conjugate()
    xi = named_form("nonradial")
    F = RatField(d.vars)
    u = PowerLogExpr.from_element(F, F.coerce(Poly.parse("z^4*zb + 3*z^3 - zb^3*z + z*zb + 1", d.vars)))
    Pu = apply_op(P, u)
    Z, dA = grid()
    lhs = np.sum(Pu.evaluate({"z": Z}, lam) * xi.evaluate({"z": Z})) * dA
    rhs = np.sum(u.evaluate({"z": Z}, lam) * apply_adjoint(P, xi, lam).evaluate({"z": Z})) * dA
    assert abs(lhs - rhs) <= 1e-6 * abs(rhs)
