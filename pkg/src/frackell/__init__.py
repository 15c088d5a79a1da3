"""Fractional Bell polynomials, fractional Stirling numbers and the
fractional Poisson distribution, in arbitrary precision."""

__version__ = "0.1.0"

from .bell import BellEvalContext, bell_number, bell_poly, bell_poly_series
from .errors import (
    CapacityError,
    ContractError,
    DomainError,
    FrackellError,
    NonConvergenceError,
    RangeError,
)
from .genfun import (
    GenFunReport,
    gf_bell_numbers,
    gf_bell_poly,
    gf_stirling_bivariate,
    gf_stirling_fixed_l,
    verify_bell_gf,
    verify_stirling_gf,
)
from .mittag_leffler import MLRequest, ml_derivative, ml_eval, mittag_leffler, scaled_derivative
from .poisson import DistributionTable, PmfParams, adaptive_pmf_table, moment, pmf, pmf_table
from .precision import MuParam, PrecReal, SeriesResult, big_binomial, gamma_real, sum_adaptive
from .sampler import SampleRun, empirical_moments, moment_standard_errors, sample_counts
from .stirling import StirlingTriangle, build_triangle, classic_stirling_triangle, stirling_value

__all__ = [
    "BellEvalContext",
    "CapacityError",
    "ContractError",
    "DistributionTable",
    "DomainError",
    "FrackellError",
    "GenFunReport",
    "MLRequest",
    "MuParam",
    "NonConvergenceError",
    "PmfParams",
    "PrecReal",
    "RangeError",
    "SampleRun",
    "SeriesResult",
    "StirlingTriangle",
    "adaptive_pmf_table",
    "bell_number",
    "bell_poly",
    "bell_poly_series",
    "big_binomial",
    "build_triangle",
    "classic_stirling_triangle",
    "empirical_moments",
    "gamma_real",
    "gf_bell_numbers",
    "gf_bell_poly",
    "gf_stirling_bivariate",
    "gf_stirling_fixed_l",
    "ml_derivative",
    "ml_eval",
    "mittag_leffler",
    "moment",
    "moment_standard_errors",
    "pmf",
    "pmf_table",
    "sample_counts",
    "scaled_derivative",
    "stirling_value",
    "sum_adaptive",
    "verify_bell_gf",
    "verify_stirling_gf",
]
