"""Spectral toolkit for the semirelativistic kinetic operator ``sqrt(1 - Laplacian) - 1`` on periodic grids."""

from .grid import SpectralGrid, apply_T, kinetic_symbol
from .kernel import (
    SupportOverlapError,
    bessel_k2,
    bessel_k2_integral,
    kernel_form,
    off_diagonal_kernel,
    smooth_bump,
    support_distance,
)
from .localization import (
    ConvergenceWarning,
    CutoffFunction,
    PartitionOfUnity,
    check_resolution,
    chi,
    commutator,
    commutator_norm,
    fourier_commutator_bound,
    ims_error,
    smooth_step,
)
from .spectrum import DecayFit, EigenConvergenceError, decay_rate, ground_state, shell_averages, smoothed_coulomb
from .zhislin import RadialGrid, ZhislinReport, shell_profile, zhislin_trial_bound

__all__ = [
    "SpectralGrid",
    "apply_T",
    "kinetic_symbol",
    "SupportOverlapError",
    "bessel_k2",
    "bessel_k2_integral",
    "kernel_form",
    "off_diagonal_kernel",
    "smooth_bump",
    "support_distance",
    "ConvergenceWarning",
    "CutoffFunction",
    "PartitionOfUnity",
    "check_resolution",
    "chi",
    "commutator",
    "commutator_norm",
    "fourier_commutator_bound",
    "ims_error",
    "smooth_step",
    "DecayFit",
    "EigenConvergenceError",
    "decay_rate",
    "ground_state",
    "shell_averages",
    "smoothed_coulomb",
    "RadialGrid",
    "ZhislinReport",
    "shell_profile",
    "zhislin_trial_bound",
]
