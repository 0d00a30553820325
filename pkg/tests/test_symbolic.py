import cmath
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pvext.symbolic import (GaussRat, Poly, PowerLogExpr, RatField, SingularityError,
                            SqrtField, UniverseMismatch, universe)

V1 = universe("z")
V2 = universe("z1", "z2")
VS = universe("s1", "s2")
F1 = RatField(V1)
F2 = RatField(V2)

small = st.integers(-3, 3)
gauss = st.builds(lambda a, b, c: GaussRat(Fraction(a, c), Fraction(b, c)), small, small, st.integers(1, 3))


@st.composite
def polys(draw, vars=V2, max_terms=4, max_deg=2):
    names = [v for v in vars if v != "lam"]
    p = Poly.zero(vars)
    for _ in range(draw(st.integers(0, max_terms))):
        powers = {n: draw(st.integers(0, max_deg)) for n in names}
        p = p + Poly.monomial(vars, powers, draw(gauss))
    return p


def P(text, vars=V1):
    return Poly.parse(text, vars)


# --- Rat / GaussRat --------------------------------------------------------------

def test_gaussrat_canonical_form():
    x = GaussRat(Fraction(4, -6), Fraction(0))
    assert x.re == Fraction(-2, 3)
    assert x.re.denominator > 0
    assert GaussRat.parse("1/2+1/4*i") == GaussRat(Fraction(1, 2), Fraction(1, 4))
    assert GaussRat(2) ** 2 == GaussRat(4)


def test_gaussrat_inverse_and_conjugate():
    x = GaussRat(Fraction(1, 2), Fraction(-3, 5))
    assert x * x.inverse() == GaussRat(1)
    assert x * x.conjugate() == GaussRat(x.norm())


# --- Poly arithmetic ---------------------------------------------------------------

def test_difference_of_squares():
    assert P("(z+1)*(z-1)") == P("z^2-1")


def test_additive_identity():
    p = P("3*z^2 + (1/2)*zb - 7")
    assert p + Poly.zero(V1) == p


def test_discriminant_substitution():
    disc = Poly.parse("s1^2 - 4*s2", VS)
    image = disc.compose({"s1": Poly.parse("z1+z2", V2), "s2": Poly.parse("z1*z2", V2),
                          "sb1": Poly.parse("zb1+zb2", V2), "sb2": Poly.parse("zb1*zb2", V2)}, V2)
    assert image == Poly.parse("(z1-z2)^2", V2)


def test_universe_mismatch_raises():
    with pytest.raises(UniverseMismatch):
        P("z") + Poly.parse("z1", V2)


def test_no_zero_coefficients_stored():
    p = P("z + zb") - P("zb")
    assert all(c != GaussRat(0) for c in p.terms.values())
    assert p == P("z")


@settings(max_examples=40, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a * b == b * a


# --- differentiation ---------------------------------------------------------------

def test_power_rule():
    z = F1.coerce(P("z"))
    e = PowerLogExpr.power(F1, z, anti_lam=0)
    d = e.diff("z")
    expected = PowerLogExpr.power(F1, z, a=-1, anti_lam=0, coeff=P("lam"))
    assert d == expected


def test_log_derivative():
    z = F1.coerce(P("z"))
    d = PowerLogExpr.log(F1, z).diff("z")
    assert d == PowerLogExpr.from_element(F1, F1.coerce(P("1")) / z)


def test_chain_rule():
    g = F1.coerce(P("z^2+1"))
    e = PowerLogExpr.power(F1, g, anti_lam=0, coeff=P("zb"))
    d = e.diff("z")
    expected = PowerLogExpr.power(F1, g, a=-1, anti_lam=0, coeff=P("2*lam*z*zb"))
    assert d == expected


def test_holomorphic_diff_ignores_conjugate_powers():
    z = F1.coerce(P("z"))
    e = PowerLogExpr.power(F1, z, holo_lam=0, anti_lam=1)
    assert e.diff("z").is_zero()
    assert not e.diff("zb").is_zero()


@st.composite
def exprs(draw):
    f = draw(polys(max_terms=2, max_deg=1).filter(lambda p: not p.is_zero()))
    R = draw(polys(max_terms=2, max_deg=2))
    a = draw(st.integers(-1, 1))
    q = draw(st.integers(0, 1))
    fF = F2.coerce(f)
    logs = {fF: q} if q else None
    return PowerLogExpr.power(F2, fF, a=a, coeff=F2.coerce(R), logs=logs)


@settings(max_examples=25, deadline=None)
@given(exprs(), st.sampled_from(["z1", "z2", "zb1", "zb2"]), st.sampled_from(["z1", "z2", "zb1", "zb2"]))
def test_mixed_partials_commute(e, x, y):
    assert e.diff(x).diff(y) == e.diff(y).diff(x)


@settings(max_examples=25, deadline=None)
@given(exprs(), st.integers(0, 10_000))
def test_derivative_matches_finite_differences(e, seed):
    rng = np.random.default_rng(seed)
    z1, z2 = rng.normal(size=2) + 1j * rng.normal(size=2)
    lam = 0.3 + 0.2j
    h = 1e-5
    d = e.diff("z1")
    try:
        exact = complex(d.evaluate({"z1": z1, "z2": z2}, lam))

        # Wirtinger derivative (d/dx - i d/dy)/2 at genuine conjugate points
        def val(w):
            return complex(e.evaluate({"z1": w, "z2": z2}, lam))

        fd = ((val(z1 + h) - val(z1 - h)) - 1j * (val(z1 + 1j * h) - val(z1 - 1j * h))) / (4 * h)
    except SingularityError:
        return
    scale = max(abs(exact), abs(val(z1)), 1.0)
    assert abs(fd - exact) <= 1e-6 * scale


# --- evaluation ----------------------------------------------------------------------

def test_integer_power_value():
    e = PowerLogExpr.abs_power(F1, F1.coerce(P("z")))
    assert e.evaluate({"z": 2.0}, 2.0) == pytest.approx(16.0)


def test_log_value_at_e():
    e = PowerLogExpr.log(F1, F1.coerce(P("z")))
    assert e.evaluate({"z": np.e}) == pytest.approx(2.0)


def test_principal_branch_half_power():
    e = PowerLogExpr.power(F1, F1.coerce(P("z")), anti_lam=0)
    got = complex(e.evaluate({"z": -1.0 + 0j}, 0.5))
    r, th = cmath.polar(-1.0 + 0j)
    oracle = r ** 0.5 * cmath.exp(0.5j * th)
    assert abs(got - oracle) < 1e-14
    assert abs(got - 1j) < 1e-14


def test_singularity_guard():
    e = PowerLogExpr.abs_power(F1, F1.coerce(P("z")), N=1)
    with pytest.raises(SingularityError):
        e.evaluate({"z": 1e-14}, 0.3)
    e.evaluate({"z": 1e-14}, 0.3, guard=1e-16)


def test_lambda_substitution_recovers_abs_power():
    e = PowerLogExpr.power(F1, F1.coerce(P("z")), a=Fraction(1, 2), b=Fraction(1, 2)).subs_lambda(0)
    assert e.evaluate({"z": 3.0 + 4.0j}) == pytest.approx(5.0)


# --- square-root extension ------------------------------------------------------

SF = SqrtField(VS, [Poly.parse("s1^2-4*s2", VS), Poly.parse("sb1^2-4*sb2", VS)], conj_index=(1, 0))


def test_sqrt_squares_to_radicand():
    r = SF.sqrt(0)
    assert r * r == SF.coerce(Poly.parse("s1^2-4*s2", VS))
    assert (r * r).is_constant() is False


def test_sqrt_conjugation_swaps_radicals():
    assert SF.sqrt(0).conj() == SF.sqrt(1)


@settings(max_examples=25, deadline=None)
@given(polys(VS, 2, 1), polys(VS, 2, 1), polys(VS, 2, 1), polys(VS, 2, 1))
def test_sqrt_product_rule_and_conjugation(u1, v1, u2, v2):
    r = SF.sqrt(0)
    x = SF.coerce(u1) + SF.coerce(v1) * r
    y = SF.coerce(u2) + SF.coerce(v2) * r
    g = Poly.parse("s1^2-4*s2", VS)
    expected = SF.coerce(u1 * u2 + v1 * v2 * g) + SF.coerce(u1 * v2 + u2 * v1) * r
    assert x * y == expected
    assert (x * y).conj() == x.conj() * y.conj()
    assert x.conj().conj() == x
