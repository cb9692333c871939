"""Exact polynomial algebra: polynomials, circular term orders, division, rank."""

from fct.algebra.groebner import (
    first_failing_pair,
    is_groebner_basis,
    leading_monomial,
    leading_term,
    reduce,
    s_polynomial,
)
from fct.algebra.linalg import exact_rank, rref, solve_in_span, sparse_rank
from fct.algebra.order import TermOrder, circular_order
from fct.algebra.polynomial import (
    ONE,
    Monomial,
    Polynomial,
    Variable,
    lam,
    natural_key,
    poly_add,
    poly_mul,
    s,
    sigma,
    substitute,
)
from fct.algebra.text import format_polynomial, parse_polynomial, parse_variable

__all__ = [
    "ONE", "Monomial", "Polynomial", "Variable", "TermOrder",
    "circular_order", "exact_rank", "first_failing_pair", "format_polynomial",
    "is_groebner_basis", "lam", "leading_monomial", "leading_term",
    "natural_key", "parse_polynomial", "parse_variable", "poly_add", "poly_mul",
    "reduce", "rref", "s", "s_polynomial", "sigma", "solve_in_span",
    "sparse_rank", "substitute",
]
