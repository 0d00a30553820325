import dataclasses
import json
from fractions import Fraction

import numpy as np
from hypothesis import given, settings, strategies as st

from pvext.symbolic import GaussRat, Poly, PowerLogExpr, RatField, universe
from pvext.weyl import (DiffOperator, adjoint, apply_op, catalog, catalog_json, certify_conjugate,
                        certify_iterate, conjugate_op, iterate_bernstein, load_catalog, lookup,
                        numeric_bernstein_check, verify_bernstein)

V1 = universe("z")
V2 = universe("z1", "z2")


def dz(order=1, coeff=1, vars=V1):
    return DiffOperator.partial(vars, ("z",), "z", order, coeff)


def mul(text, vars=V1, dvars=("z",)):
    return DiffOperator.multiplication(vars, dvars, Poly.parse(text, vars))


def lam_poly(text, vars=V1):
    return Poly.parse(text, vars)


# --- application --------------------------------------------------------------------

def test_apply_derivative_to_power():
    F = RatField(V1)
    z = F.coerce(Poly.parse("z", V1))
    e = PowerLogExpr.power(F, z, 1, 0, anti_lam=0)
    expected = PowerLogExpr.power(F, z, 0, 0, anti_lam=0, coeff=lam_poly("lam+1"))
    assert apply_op(dz(), e) == expected


def test_apply_second_order_to_square():
    d = lookup("z^2")
    lhs = apply_op(d.P, d.power(1))
    rhs = d.power(0).scale(d.field.coerce(lam_poly("(lam+1)*(lam+1/2)")))
    assert lhs == rhs


def test_apply_mixed_to_product():
    d = lookup("z1*z2")
    lhs = apply_op(d.P, d.power(1))
    rhs = d.power(0).scale(d.field.coerce(Poly.parse("(lam+1)^2", V2)))
    assert lhs == rhs


# --- adjoint -------------------------------------------------------------------------

def test_adjoint_examples():
    assert adjoint(dz()) == dz(coeff=-1)
    assert adjoint(mul("z") @ dz()) == mul("-z") @ dz() + mul("-1")
    assert adjoint(dz(2)) == dz(2)


def test_commutator_relation():
    assert dz() @ mul("z") - mul("z") @ dz() == DiffOperator.identity(V1, ("z",))


ops = st.builds(
    lambda a, b, c, n: mul(f"{a} + {b}*z + {c}*lam*z^2") @ dz(n),
    st.integers(-2, 2), st.integers(-2, 2), st.integers(-2, 2), st.integers(0, 2))


@settings(max_examples=30, deadline=None)
@given(ops, ops)
def test_adjoint_is_involutive_antihomomorphism(P, Q):
    assert adjoint(adjoint(P)) == P
    assert adjoint(P @ Q) == adjoint(Q) @ adjoint(P)


@settings(max_examples=20, deadline=None)
@given(ops, ops, st.integers(-1, 2))
def test_composition_matches_sequential_application(P, Q, a):
    F = RatField(V1)
    e = PowerLogExpr.power(F, F.coerce(Poly.parse("z^2+1", V1)), a, 0, anti_lam=0,
                           coeff=Poly.parse("zb + z", V1))
    assert apply_op(P @ Q, e) == apply_op(P, apply_op(Q, e))


@settings(max_examples=20, deadline=None)
@given(ops, ops, ops)
def test_composition_is_associative(P, Q, R):
    assert (P @ Q) @ R == P @ (Q @ R)


# --- Bernstein catalog ---------------------------------------------------------------

def test_catalog_contents():
    assert set(catalog()) == {"z", "z^2", "z^3", "z^4", "z1*z2", "z1^2+z2^2"}


def test_every_catalog_datum_verifies():
    for d in catalog().values():
        cert = verify_bernstein(d)
        assert cert.passed, (d.name, cert.residual)
        assert cert.residual == "0"


def test_catalog_b_roots_negative_rational():
    for d in catalog().values():
        assert d.roots_rational_negative()
        assert all(isinstance(r, Fraction) for r, _ in d.b_roots)
        b = d.b()
        assert b.leading()[1] == GaussRat(1)


def test_monomial_b_polynomials():
    assert lookup("z^3").b() == lam_poly("(lam+1/3)*(lam+2/3)*(lam+1)")
    assert lookup("z1^2+z2^2").b() == Poly.parse("(lam+1)^2", V2)


def test_lookup_by_polynomial():
    assert lookup("z**2").name == "z^2"


def test_iterate_identity_case():
    d = lookup("z")
    P1, B1 = iterate_bernstein(d, 1)
    assert P1 == d.P and B1 == d.b()


def test_iterate_examples():
    d = lookup("z")
    P2, B2 = iterate_bernstein(d, 2)
    assert P2 == dz(2) and B2 == lam_poly("(lam+1)*(lam+2)")
    P3, B3 = iterate_bernstein(d, 3)
    assert P3 == dz(3) and B3 == lam_poly("(lam+1)*(lam+2)*(lam+3)")


def test_iterates_certify_up_to_five():
    for d in catalog().values():
        for M in range(1, 6):
            assert certify_iterate(d, M).passed, (d.name, M)


def test_conjugate_operator_examples():
    assert conjugate_op(dz()) == DiffOperator.partial(V1, ("zb",), "zb", 1)
    assert conjugate_op(mul("z") @ dz()) == (mul("zb", dvars=("zb",))
                                             @ DiffOperator.partial(V1, ("zb",), "zb", 1))
    assert certify_conjugate(lookup("z^2"), 1).passed


def test_corrupted_datum_fails():
    d = lookup("z^2")
    bad = dataclasses.replace(d, b_roots=[(Fraction(-1, 2), 1), (Fraction(-2), 1)])
    cert = verify_bernstein(bad)
    assert not cert.passed
    assert cert.residual != "0"


def test_numeric_crosscheck():
    rng = np.random.default_rng(7)
    for d in catalog().values():
        assert numeric_bernstein_check(d, rng) <= 1e-10


def test_catalog_json_roundtrip():
    text = catalog_json()
    loaded = load_catalog(text)
    assert set(loaded) == set(catalog())
    for name, d in loaded.items():
        assert d.P == catalog()[name].P
        assert d.b() == catalog()[name].b()
        assert verify_bernstein(d).passed
    assert json.loads(text)["version"]
