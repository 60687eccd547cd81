"""Mass-dependent systems with an evenly spaced (oscillator) spectrum.

The superpotential

    W(r) = (omega/2) int_0^r sqrt(M) + (1/2) (1/sqrt(M))'

makes the BenDaniel-Duke problem with V0 = W^2 - (W/sqrt M)' + omega/2
exactly solvable with levels (n + 1/2) omega.  In the variable
u = int_0^r sqrt(M) the problem is an ordinary oscillator, which gives the
unperturbed states F_n = F_0 H_n(sqrt(omega/2) u).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial import hermite

from .calculus import RadialGrid, central_derivative, cumulative_integral
from .errors import EvaluationError
from .potentials import AmbiguityParams, QuantumSetting
from .profiles import MassProfile, eval_mass
from .split import (
    SplitReport,
    SuperpotentialField,
    _identity_gap,
    _stats,
    check_allowed,
    delta_e_pointwise,
    g_factor,
)

DEFAULT_SOLVABLE_THRESHOLD = 1e-8
DEFAULT_NODES = 2001


def oscillator_superpotential(profile: MassProfile, omega: float, r):
    r = profile.check_domain(r)
    m, dm, _ = eval_mass(profile, r)
    # (1/sqrt M)' = -M' / (2 M^(3/2))
    return 0.5 * omega * profile.sqrt_integral(r) - 0.25 * dm / m**1.5


def oscillator_field(profile: MassProfile, omega: float) -> SuperpotentialField:
    if not omega > 0:
        raise ValueError("omega must be positive")
    return SuperpotentialField(
        w=lambda r: oscillator_superpotential(profile, omega, r),
        epsilon0=0.5 * omega,
        source="oscillator",
    )


def unperturbed_potential(profile: MassProfile, omega: float, r):
    """V0 = W^2 - (W/sqrt M)' + omega/2, derivative by central differences."""
    if not omega > 0:
        raise ValueError("omega must be positive")
    r = np.asarray(r, dtype=float)

    def scaled(x):
        return oscillator_superpotential(profile, omega, x) / np.sqrt(profile(x))

    w = oscillator_superpotential(profile, omega, r)
    return w**2 - central_derivative(scaled, r) + 0.5 * omega


def ground_state_f(profile: MassProfile, omega: float, grid: RadialGrid) -> np.ndarray:
    """Unnormalized F(r) = exp(-int_0^r sqrt(M) W) on the grid nodes."""
    exponent = cumulative_integral(
        lambda z: np.sqrt(profile(z)) * oscillator_superpotential(profile, omega, z), grid
    )
    if np.max(exponent) > 700.0:
        raise EvaluationError("ground state underflows on this grid; shrink r_max")
    return np.exp(-exponent)


def unperturbed_state(profile: MassProfile, omega: float, n: int, grid: RadialGrid) -> np.ndarray:
    """F_n on the grid: the ground state times H_n(sqrt(omega/2) u)."""
    f0 = ground_state_f(profile, omega, grid)
    if n == 0:
        return f0
    u = np.sqrt(0.5 * omega) * profile.sqrt_integral(grid.nodes)
    coef = np.zeros(n + 1)
    coef[n] = 1.0
    return f0 * hermite.hermval(u, coef)


def delta_e_formula(profile, params: AmbiguityParams, setting: QuantumSetting, grid: RadialGrid) -> SplitReport:
    """Closed-form energy correction for the oscillator W, tabulated on interior nodes.

    Also evaluates the pointwise rearrangement of the correction Riccati
    equation on the same nodes; ``expansion_residual`` is the largest gap.
    """
    check_allowed(params)
    r = grid.interior()
    profile.check_domain(r)
    omega, s, k = setting.omega, params.total, setting.radial_exponent
    m, dm, _ = eval_mass(profile, r)
    sqrt_m = np.sqrt(m)
    integral = profile.sqrt_integral(r)
    d_inv_sqrt = -0.5 * dm / m**1.5

    de = d_inv_sqrt * (s * (omega * integral + d_inv_sqrt))
    coeff = 0.5 * s * (setting.N - 1) + setting.L * (s + 1.0)
    if coeff != 0:
        de = de + dm / (r * m**2) * coeff
    if k != 0:
        # (N+2L-1)/(2 r sqrt M) = k/(r sqrt M)
        radial = k / (r * sqrt_m)
        de = de + radial * omega * integral + d_inv_sqrt * radial

    w = oscillator_field(profile, omega)
    pointwise = delta_e_pointwise(profile, params, setting, w, r)
    mean, dev = _stats(de)
    report = SplitReport(mean, dev, _identity_gap(profile, params, setting, w, r, pointwise), grid, r, de)
    report.expansion_residual = float(np.max(np.abs(de - pointwise)))
    return report


@dataclass
class WavefunctionTable:
    """F, G and Psi = F G on a grid; F and G stay unnormalized."""

    grid: RadialGrid
    F: np.ndarray
    G: np.ndarray
    psi: np.ndarray
    norm: float

    @classmethod
    def build(cls, grid: RadialGrid, F, G) -> "WavefunctionTable":
        F = np.asarray(F, dtype=float)
        G = np.asarray(G, dtype=float)
        psi = F * G
        if not np.all(np.isfinite(psi)):
            raise EvaluationError("wavefunction has non-finite entries")
        return cls(grid, F, G, psi, float(np.trapezoid(psi**2, grid.nodes)))

    @property
    def psi_normalized(self) -> np.ndarray:
        return self.psi / np.sqrt(self.norm)


@dataclass
class SpectralResult:
    epsilon: float
    delta_e_mean: float
    delta_e_deviation: float
    total_e: float
    solvable: bool = True
    extrapolated: bool = False
    oracle_e: Optional[float] = None
    abs_err: Optional[float] = None
    membership: Optional[bool] = None
    oracle_estimate: Optional[float] = None
    oracle_spectrum: Optional[np.ndarray] = None


def default_grid(profile: MassProfile, setting: QuantumSetting, nodes: int = DEFAULT_NODES, r_max=None) -> RadialGrid:
    """Full line [-R, R] in one dimension, [0, R] otherwise."""
    from .oracle import default_r_max

    R = default_r_max(profile, setting.omega) if r_max is None else float(r_max)
    return RadialGrid(-R if setting.N == 1 else 0.0, R, nodes)


def assemble_solution(
    profile: MassProfile,
    params: AmbiguityParams,
    setting: QuantumSetting,
    grid: Optional[RadialGrid] = None,
    with_oracle: bool = False,
    threshold: float = DEFAULT_SOLVABLE_THRESHOLD,
    oracle_options: Optional[dict] = None,
):
    """Return ``(SpectralResult, WavefunctionTable)`` for E = eps + dE, Psi = F G.

    Levels n > 0 reuse the ground-state correction and are flagged
    ``extrapolated``.  A correction that varies by more than ``threshold``
    over the grid marks the result as not exactly solvable.
    """
    check_allowed(params)
    grid = default_grid(profile, setting) if grid is None else grid
    omega = setting.omega
    eps = (setting.n + 0.5) * omega
    report = delta_e_formula(profile, params, setting, grid)
    result = SpectralResult(
        epsilon=eps,
        delta_e_mean=report.delta_e_mean,
        delta_e_deviation=report.delta_e_max_deviation,
        total_e=eps + report.delta_e_mean,
        solvable=report.delta_e_max_deviation <= threshold,
        extrapolated=setting.n > 0,
    )
    F = unperturbed_state(profile, omega, setting.n, grid)
    G = g_factor(profile, params, setting, grid.nodes)
    table = WavefunctionTable.build(grid, F, G)
    if with_oracle:
        from .oracle import verify_against_analytic

        result = verify_against_analytic(result, profile, params, setting, **(oracle_options or {}))
    return result, table
