"""Bound-entanglement detection for two qudits via mutually unbiased bases and PPT."""

from .errors import BoundsimError, NumericalError, ValidationError
from .expsim import NoiseModel, measurement_budget, reconstruct, simulate_mcp, tomography_settings
from .mubs import MubFamily, mub_family, verify_mub
from .numkernel import fidelity, herm_eigvals, partial_transpose
from .search import SliceSpec, horodecki_sweep, optimize_witness, scan_slice
from .simplex import (
    FamilyParams,
    SimplexCoeffs,
    bell_state,
    coeffs_from_family,
    equivalent_variants,
    family_state,
    horodecki_params,
    ppt_min_eig,
    state_from_coeffs,
    weyl,
)
from .witness import CorrelationReport, Labeling, mcp, mcp_coeffs, separable_bound

__all__ = [
    "BoundsimError",
    "CorrelationReport",
    "FamilyParams",
    "Labeling",
    "MubFamily",
    "NoiseModel",
    "NumericalError",
    "SimplexCoeffs",
    "SliceSpec",
    "ValidationError",
    "bell_state",
    "coeffs_from_family",
    "equivalent_variants",
    "family_state",
    "fidelity",
    "herm_eigvals",
    "horodecki_params",
    "horodecki_sweep",
    "mcp",
    "mcp_coeffs",
    "measurement_budget",
    "mub_family",
    "optimize_witness",
    "partial_transpose",
    "ppt_min_eig",
    "reconstruct",
    "scan_slice",
    "separable_bound",
    "simulate_mcp",
    "state_from_coeffs",
    "tomography_settings",
    "verify_mub",
    "weyl",
]
