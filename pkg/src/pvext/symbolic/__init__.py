"""Exact symbolic layer: Gaussian rationals, polynomials, rational functions,
square-root extensions and power/log expressions."""

from .gaussrat import GaussRat, Rat, parse_rational, ZERO, ONE, I
from .poly import LAMBDA, Poly, UniverseMismatch, conj_name, is_bar, universe
from .ratfn import DEFAULT_GUARD, RatField, RatFn, SingularityError
from .sqrtext import SqrtExt, SqrtField
from .expr import PowerLogExpr, complete_env

__all__ = [
    "GaussRat", "Rat", "parse_rational", "ZERO", "ONE", "I",
    "LAMBDA", "Poly", "UniverseMismatch", "conj_name", "is_bar", "universe",
    "DEFAULT_GUARD", "RatField", "RatFn", "SingularityError",
    "SqrtExt", "SqrtField", "PowerLogExpr", "complete_env",
]
