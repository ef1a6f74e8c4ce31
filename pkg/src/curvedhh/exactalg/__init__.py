"""Exact scalars, weighted polynomials and Gröbner bases."""

from .scalars import GF, QQ, Field, Mod, PrimeField, RatFunc, RationalField, RationalFunctionField, field_from_descriptor
from .poly import Poly, PolyRing, format_poly, parse_poly, strip_laurent
from .groebner import (GroebnerBasis, IdealBasis, QuotientDimension, buchberger, groebner_with_cofactors,
                       ideal_is_unit, ideal_sum, ideals_equal, jacobian_ideal, lift, monomials_of_weight,
                       normal_form, quotient_dimension, saturate, standard_monomials)

__all__ = [
    "GF", "QQ", "Field", "Mod", "PrimeField", "RatFunc", "RationalField", "RationalFunctionField",
    "field_from_descriptor", "Poly", "PolyRing", "format_poly", "parse_poly", "strip_laurent",
    "GroebnerBasis", "IdealBasis", "QuotientDimension", "buchberger", "groebner_with_cofactors",
    "ideal_is_unit", "ideal_sum", "ideals_equal", "jacobian_ideal", "lift", "monomials_of_weight",
    "normal_form", "quotient_dimension", "saturate", "standard_monomials",
]
