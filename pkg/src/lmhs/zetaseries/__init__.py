"""Zeta-value constants, hypergeometric-type multiple series and the region polynomials."""

from .constants import (
    GAMMA_CLOSED,
    GAMMA_TILDE_CLOSED,
    NAMED_SPECS,
    PartitionCoeff,
    evaluate_zeta_polynomial,
    gamma_n,
    gamma_spec,
    gamma_tilde_n,
    gamma_tilde_spec,
    named_constant,
    partition_coeffs,
    same_zeta_polynomial,
)
from .identities import (
    IdentityReport,
    beta_delta_identity,
    g2_identity,
    normalized_d3_in_zetas,
    partial_d6,
    partial_d6_exact,
    recognize_rational,
    region1_generic,
    region_poly_d3,
    region_poly_d3_exact,
    symbol_values,
    theorem_d3,
)
from .series import DenFactor, SeriesSpec, SeriesValue, eval_series, partial_sum

__all__ = [
    "DenFactor",
    "GAMMA_CLOSED",
    "GAMMA_TILDE_CLOSED",
    "IdentityReport",
    "NAMED_SPECS",
    "PartitionCoeff",
    "SeriesSpec",
    "SeriesValue",
    "beta_delta_identity",
    "eval_series",
    "evaluate_zeta_polynomial",
    "g2_identity",
    "gamma_n",
    "gamma_spec",
    "gamma_tilde_n",
    "gamma_tilde_spec",
    "named_constant",
    "normalized_d3_in_zetas",
    "partial_d6",
    "partial_d6_exact",
    "partial_sum",
    "partition_coeffs",
    "recognize_rational",
    "region1_generic",
    "region_poly_d3",
    "region_poly_d3_exact",
    "same_zeta_polynomial",
    "symbol_values",
    "theorem_d3",
]
