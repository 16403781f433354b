"""Exact certificates, constructions and affine-sphere geometry for H(F) = kappa F^m."""
from .polyring import Poly, RationalFn, ParseError, parse_poly, to_text, substitute_affine
from .hessian import hessian_det, u_of_f, twisted_det, det_exact, inertia
from .verify import (Relation, HomogeneityClass, infer_power_relation, verify_power_relation_pit,
                     verify_exponential_relation, verify_rational_relation, check_level_constancy,
                     classify_homogeneity)

__all__ = [
    "Poly", "RationalFn", "ParseError", "parse_poly", "to_text", "substitute_affine",
    "hessian_det", "u_of_f", "twisted_det", "det_exact", "inertia",
    "Relation", "HomogeneityClass", "infer_power_relation", "verify_power_relation_pit",
    "verify_exponential_relation", "verify_rational_relation", "check_level_constancy",
    "classify_homogeneity",
]
__version__ = "0.1.0"
