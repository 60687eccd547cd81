"""Splitting method for N-dimensional position-dependent-mass Schrödinger equations.

Units: hbar = 2 m0 = 1 throughout, so every quantity is dimensionless.
"""

from .calculus import RadialGrid, adaptive_quadrature, central_derivative, cumulative_integral
from .errors import AccuracyError, DomainError, EvaluationError, PdmError, RestrictionError
from .oscillator import (
    SpectralResult,
    WavefunctionTable,
    assemble_solution,
    delta_e_formula,
    ground_state_f,
    oscillator_field,
    oscillator_superpotential,
    unperturbed_potential,
)
from .potentials import AmbiguityParams, QuantumSetting, delta_v, u_alpha_gamma, u_eff
from .profiles import MassProfile, constant, eval_mass, get_profile, inverse_quadratic, rational, validate_profile
from .split import (
    SplitReport,
    SuperpotentialField,
    cross_term_check,
    delta_e_pointwise,
    delta_w,
    g_factor,
    solvability_check,
)

__version__ = "0.1.0"
