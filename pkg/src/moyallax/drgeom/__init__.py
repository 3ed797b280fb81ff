"""Intersection numbers of lambda_g, DR cycles and Theta, and the Fourier dictionary."""

from .extraction import Extraction, extract_from_flow, extract_intersection_numbers, hamiltonian
from .fourier import (
    FourierPoly,
    automorphism_count,
    constant_coefficient,
    fourier_substitute,
    functional_equal,
    functional_is_zero,
)
from .integrals import (
    VANISHES,
    NotDetermined,
    determinant,
    proof_consistency_value,
    psi_pullback_factor,
    quadratic_dr_integral,
    quadratic_table,
    step1_series,
    table_to_csv,
    theta_dr_boundary_term,
    theta_dr_psi_integral,
    theta_normalized,
    theta_normalized_recursive,
    theta_power_dr_value,
)

__all__ = [
    "Extraction",
    "extract_from_flow",
    "extract_intersection_numbers",
    "hamiltonian",
    "FourierPoly",
    "automorphism_count",
    "constant_coefficient",
    "fourier_substitute",
    "functional_equal",
    "functional_is_zero",
    "VANISHES",
    "NotDetermined",
    "determinant",
    "proof_consistency_value",
    "psi_pullback_factor",
    "quadratic_dr_integral",
    "quadratic_table",
    "step1_series",
    "table_to_csv",
    "theta_dr_boundary_term",
    "theta_dr_psi_integral",
    "theta_normalized",
    "theta_normalized_recursive",
    "theta_power_dr_value",
]
