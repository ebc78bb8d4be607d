"""Inequality suites and their reports."""

from .report import (MAX_RELATIVE_CHANGE, VerificationCase, VerificationReport, pointwise_case,
                     ratio_of, refine, relative_change)
from .suites import (TELESCOPING_FLOOR, a1_constant, input_grid, interior_mask,
                     verify_bmo_cubes, verify_fefferman_stein, verify_kolmogorov,
                     verify_maximal_bounds, verify_sharp_estimate, verify_variable_exponent,
                     verify_weighted_bounds)

__all__ = [
    "MAX_RELATIVE_CHANGE", "VerificationCase", "VerificationReport", "pointwise_case",
    "ratio_of", "refine", "relative_change", "TELESCOPING_FLOOR", "a1_constant", "input_grid",
    "interior_mask", "verify_bmo_cubes", "verify_fefferman_stein", "verify_kolmogorov",
    "verify_maximal_bounds", "verify_sharp_estimate", "verify_variable_exponent",
    "verify_weighted_bounds",
]
