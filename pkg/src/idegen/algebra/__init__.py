"""Exact rational polynomial algebra."""

from idegen.algebra.coords import CoordinateSystem
from idegen.algebra.grammar import format_poly, parse_poly
from idegen.algebra.matrix import PolyMatrix, adjugate, mat_inverse_constdet
from idegen.algebra.poly import (
    Polynomial,
    Rational,
    const,
    diff,
    eval_poly,
    format_rational,
    to_rational,
    var,
)

__all__ = [
    "CoordinateSystem",
    "PolyMatrix",
    "Polynomial",
    "Rational",
    "adjugate",
    "const",
    "diff",
    "eval_poly",
    "format_poly",
    "format_rational",
    "mat_inverse_constdet",
    "parse_poly",
    "to_rational",
    "var",
]
