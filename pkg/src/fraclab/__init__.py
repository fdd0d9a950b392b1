"""Numerical laboratory for fractional Hardy-Sobolev extremals.

Solves the positive radial extremal profile of the weighted fractional
equation (-Delta)^s u = u^p |x|^{-t} on a geometric radial grid, and
measures the quantitative behavior built on it: linearized spectra and the
spectral gap, multi-profile interaction scaling laws, deficit-versus-
distance stability experiments, logarithmic-cutoff norm decay, and
weighted fractional commutator bounds.
"""

from .bubble import (Bubble, bubble_derivative, dilate, dump_bubble,
                     load_bubble, mu_constant, solve_bubble)
from .cutoff import (CutoffSpec, ap_power_weight_check, commutator,
                     cutoff_sweep, cutoff_weighted_norm, kpv_ratio,
                     log_cutoff, paper_kpv_instance)
from .errors import (ConsistencyFailureError, DegenerateConfigurationError,
                     DegenerateInputError, FracLabError, GridMismatchError,
                     InsufficientDataError, InvalidArgumentError,
                     InvalidDataError, NonIntegrableWeightError,
                     NumericalInstabilityError, SolverFailureError)
from .grid import (RadialFn, RadialGrid, default_grid, integrate_radial,
                   make_log_grid, sphere_area, tail_fraction,
                   weighted_lp_norm)
from .interaction import (hs_cross_inner, interaction_sweep,
                          localized_interaction_check, qij,
                          scaling_regression, two_bubble_integral)
from .params import Params
from .spectrum import SpectralReport, linearized_eigs, spectral_gap_check
from .stability import (BubbleFamily, StabilityReport,
                        check_elementary_inequalities, default_bump, deficit,
                        energy_window_check, project_multibubble,
                        separation_scales, sharpness_family, stability_sweep)
from .transform import (dual_norm, frac_inverse, frac_power, hs_inner,
                        hs_norm, radial_fourier, radial_fourier_inverse)

__version__ = "1.0.0"

__all__ = [
    "Bubble", "BubbleFamily", "ConsistencyFailureError", "CutoffSpec",
    "DegenerateConfigurationError", "DegenerateInputError", "FracLabError",
    "GridMismatchError", "InsufficientDataError", "InvalidArgumentError",
    "InvalidDataError", "NonIntegrableWeightError",
    "NumericalInstabilityError", "Params", "RadialFn", "RadialGrid",
    "SolverFailureError", "SpectralReport", "StabilityReport",
    "ap_power_weight_check", "bubble_derivative",
    "check_elementary_inequalities", "commutator", "cutoff_sweep",
    "cutoff_weighted_norm", "default_bump", "default_grid", "deficit",
    "dilate", "dual_norm", "dump_bubble", "energy_window_check",
    "frac_inverse", "frac_power", "hs_cross_inner", "hs_inner", "hs_norm",
    "integrate_radial", "interaction_sweep", "kpv_ratio",
    "linearized_eigs", "load_bubble", "localized_interaction_check",
    "log_cutoff", "make_log_grid", "mu_constant", "paper_kpv_instance",
    "project_multibubble", "qij", "radial_fourier",
    "radial_fourier_inverse", "scaling_regression", "separation_scales",
    "sharpness_family", "solve_bubble", "spectral_gap_check",
    "sphere_area", "stability_sweep", "tail_fraction",
    "two_bubble_integral", "weighted_lp_norm",
]
