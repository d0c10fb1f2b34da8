"""Operator-monotone contraction and correlation coefficients.

A numerical library for the ``J_{f,sigma}`` operators induced by operator
monotone functions, the quantum chi-squared divergences they define, their
input-dependent contraction coefficients, quantum maximal correlation
coefficients, reversal (recovery) maps, and mixing-time bounds for quantum
channels with a full-rank fixed point.
"""

from qcontract.channels import (
    canonical_purification,
    extract_channel,
    f_coupling,
    heisenberg_reversal,
    petz_recovery,
    pinching,
    schrodinger_reversal,
)
from qcontract.contraction import (
    chi2_f,
    contraction_coefficient,
    contraction_extreme_check,
    dpi_saturated,
    get_onb,
    mixing_time_bound,
)
from qcontract.correlation import (
    classical_mu,
    correspondence_check,
    gm_schmidt_spectrum,
    mu_f,
    mu_lin_k,
    rho_tilde_k,
    tensorization_check,
    verify_decomposition,
)
from qcontract.divergences import d_max, relative_entropy, sandwiched_renyi, trace_distance
from qcontract.joperator import WeightedSpace, apply_J, covariance, expectation, inner_product, variance
from qcontract.linalg import ChannelRep, DensityOperator, LinearMap
from qcontract.monotone import AM, CATALOG, GM, HM, LM, MonotoneFn, perspective, power

__version__ = "0.1.0"

__all__ = [
    "AM",
    "CATALOG",
    "ChannelRep",
    "DensityOperator",
    "GM",
    "HM",
    "LM",
    "LinearMap",
    "MonotoneFn",
    "WeightedSpace",
    "apply_J",
    "canonical_purification",
    "chi2_f",
    "classical_mu",
    "contraction_coefficient",
    "contraction_extreme_check",
    "correspondence_check",
    "covariance",
    "d_max",
    "dpi_saturated",
    "expectation",
    "extract_channel",
    "f_coupling",
    "get_onb",
    "gm_schmidt_spectrum",
    "heisenberg_reversal",
    "inner_product",
    "mixing_time_bound",
    "mu_f",
    "mu_lin_k",
    "perspective",
    "petz_recovery",
    "pinching",
    "power",
    "relative_entropy",
    "rho_tilde_k",
    "sandwiched_renyi",
    "schrodinger_reversal",
    "tensorization_check",
    "trace_distance",
    "variance",
    "verify_decomposition",
]
