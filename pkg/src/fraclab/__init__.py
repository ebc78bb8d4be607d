"""Numerical workbench for multilinear fractional integrals with generalized kernels.

Modules: ``grid`` (uniform grids, sampled functions, cube families),
``kernels`` (kernel classes and smoothness certificates), ``operators``
(quadrature for the fractional integral and its commutators), ``maximal``
(maximal operators over cube families), ``spaces`` (norms, weight constants,
variable exponents), ``verify`` (inequality suites) and ``cli``.
"""

from .corpus import Expression, catalog_ids, expression
from .errors import (ConfigurationError, CostLimitError, InsufficientResolutionError,
                     SingularEvaluationError)
from .grid import (CubeFamily, GridDomain, SampledFunction, cube_family, lattice_family,
                   make_uniform_grid, sample)
from .kernels import (KernelSpec, check_size_condition, estimate_Ck, eval_kernel,
                      verify_dini_implies_generalized)
from .maximal import (frac_maximal_r, hl_maximal_delta, multilinear_frac_maximal_r,
                      sharp_maximal, sharp_maximal_delta)
from .operators import (OperatorParams, apply_commutator, apply_fractional_integral,
                        apply_riesz_potential)
from .spaces import (ExponentFunction, ExponentVector, WeightVector, ap_constant, apq_constant,
                     bmo_norm, lp_norm, luxemburg_norm, weak_lp_norm)

__version__ = "0.1.0"

__all__ = [
    "Expression", "catalog_ids", "expression",
    "ConfigurationError", "CostLimitError", "InsufficientResolutionError",
    "SingularEvaluationError",
    "CubeFamily", "GridDomain", "SampledFunction", "cube_family", "lattice_family",
    "make_uniform_grid", "sample",
    "KernelSpec", "check_size_condition", "estimate_Ck", "eval_kernel",
    "verify_dini_implies_generalized",
    "frac_maximal_r", "hl_maximal_delta", "multilinear_frac_maximal_r", "sharp_maximal",
    "sharp_maximal_delta",
    "OperatorParams", "apply_commutator", "apply_fractional_integral", "apply_riesz_potential",
    "ExponentFunction", "ExponentVector", "WeightVector", "ap_constant", "apq_constant",
    "bmo_norm", "lp_norm", "luxemburg_norm", "weak_lp_norm",
]
