"""Pseudo-spectral 2D variable-density incompressible flow, a discrete
Littlewood-Paley toolkit, and a harness that measures energy decay rates,
weighted dissipation ledgers, transport regularity growth, and the explicit
smallness constants governing viscosity perturbations."""

__version__ = "0.1.0"

from .grid import Grid
from .spectral import (DensityField, SpectralField, VelocityField, gradient,
                       leray_project, lp_norm, riesz, sobolev_norm)
from .besov import (BesovSpec, besov_norm, bony_decompose, dyadic_block,
                    heat_block_decay, low_pass, verify_bernstein)
from .viscosity import ViscosityLaw
from .advection import advect_density
from .solver import FlowState, force_decomposition, momentum_rhs, run, step
from .decay import (beta_exponent, energy_ledger, fit_decay_exponent,
                    fourier_splitting_check, heat_baseline)
from .smallness import check_smallness, compute_G, compute_K
from .transport import product_law_check, transport_block_experiment
from .inequalities import calculus_integral, gronwall_bound

__all__ = [
    "__version__", "Grid", "SpectralField", "VelocityField", "DensityField",
    "gradient", "leray_project", "riesz", "lp_norm", "sobolev_norm",
    "BesovSpec", "besov_norm", "dyadic_block", "low_pass", "bony_decompose",
    "verify_bernstein", "heat_block_decay", "ViscosityLaw", "advect_density",
    "FlowState", "momentum_rhs", "force_decomposition", "step", "run",
    "beta_exponent", "heat_baseline", "fit_decay_exponent",
    "fourier_splitting_check", "energy_ledger", "compute_K", "compute_G",
    "check_smallness", "transport_block_experiment", "product_law_check",
    "gronwall_bound", "calculus_integral",
]
