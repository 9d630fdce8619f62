"""Exact arithmetic for positive-characteristic special values.

Finite fields, varpi-adic series, Tate-algebra jets with certified
precision, Anderson-Thakur polynomials, Carlitz multiple polylogarithms,
multiple zeta values, the period series Omega, Frobenius difference
systems and bounded-height relation scans.
"""

from .fq import FqContext, FqElem, field
from .jets import JetMatrix, TateJet, jet_hyperderiv, jet_inv, jet_matrix_inverse, jet_twist, prolong
from .motive import (
    GParams,
    PhiMatrix,
    build_G_element,
    build_phi_im,
    build_phi_twisted,
    build_psi,
    build_psi_im,
    carlitz_phi_twisted,
    count_free_coordinates,
    default_us,
    dim_G,
    g_membership,
    psi_inverse_explicit,
    random_admissible_us,
    twist_working_order,
    verify_rigid,
)
from .poly import Index, ThetaPoly, TThetaPoly, at_condition_check
from .relations import RelationQuery, ScanResult, gamma_reconstruct, linear_scan, monomial_scan
from .series import PiSeries, PrecisionError, embed_theta_poly
from .special import (
    PrecisionPlan,
    at_polynomial,
    at_series_jet,
    carlitz_D,
    carlitz_gamma,
    cmpl_jet,
    mzv_oracle,
    omega_jet,
    pi_tilde,
    zeta_via_at,
)

__version__ = "0.1.0"

__all__ = [
    "FqContext",
    "FqElem",
    "GParams",
    "Index",
    "JetMatrix",
    "PhiMatrix",
    "PiSeries",
    "PrecisionError",
    "PrecisionPlan",
    "RelationQuery",
    "ScanResult",
    "TThetaPoly",
    "TateJet",
    "ThetaPoly",
    "at_condition_check",
    "at_polynomial",
    "at_series_jet",
    "build_G_element",
    "build_phi_im",
    "build_phi_twisted",
    "build_psi",
    "build_psi_im",
    "carlitz_D",
    "carlitz_gamma",
    "carlitz_phi_twisted",
    "cmpl_jet",
    "count_free_coordinates",
    "default_us",
    "dim_G",
    "embed_theta_poly",
    "field",
    "g_membership",
    "gamma_reconstruct",
    "jet_hyperderiv",
    "jet_inv",
    "jet_matrix_inverse",
    "jet_twist",
    "linear_scan",
    "monomial_scan",
    "mzv_oracle",
    "omega_jet",
    "pi_tilde",
    "prolong",
    "psi_inverse_explicit",
    "random_admissible_us",
    "twist_working_order",
    "verify_rigid",
    "zeta_via_at",
]
