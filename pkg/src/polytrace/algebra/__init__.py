from .family import ParametricFamily, coefficient_vector
from .lattice import integer_det, smith_normal_form
from .linalg import LUFactorization, lu_factor, lu_solve
from .polynomial import (
    Exponent,
    LaurentPolynomial,
    LaurentSystem,
    eval_jacobian,
    eval_poly,
    grlex_key,
    support,
    variables,
)
from .text import ParsedSystem, format_polynomial, format_system, parse_polynomial, parse_system

__all__ = [
    "Exponent",
    "LUFactorization",
    "LaurentPolynomial",
    "LaurentSystem",
    "ParametricFamily",
    "ParsedSystem",
    "coefficient_vector",
    "eval_jacobian",
    "eval_poly",
    "format_polynomial",
    "format_system",
    "grlex_key",
    "integer_det",
    "lu_factor",
    "lu_solve",
    "parse_polynomial",
    "parse_system",
    "smith_normal_form",
    "support",
    "variables",
]
