"""Two-Riccati splitting of the radial PDM problem.

The wavefunction is factored as Psi = F G.  F solves the unperturbed
BenDaniel-Duke problem through a superpotential W; the correction factor G
comes from the choice

    dW = (alpha+gamma)/2 * M'/M^(3/2) - (N+2L-1)/(2 sqrt(M) r)

and the energy shift dE is read off pointwise from the correction Riccati
equation.  Whether dE is actually constant is measured, not assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .calculus import RadialGrid, central_derivative, integrate
from .errors import DomainError, RestrictionError
from .potentials import AmbiguityParams, QuantumSetting, delta_v
from .profiles import MassProfile, eval_mass

ALLOWED = ((0.0, 0.0), (-0.5, -0.5))


@dataclass(frozen=True)
class SuperpotentialField:
    """Superpotential W(r) of the unperturbed problem and its ground energy."""

    w: Callable
    epsilon0: float
    source: str = "user-supplied"

    def __call__(self, r):
        return self.w(np.asarray(r, dtype=float))


@dataclass
class SplitReport:
    delta_e_mean: float
    delta_e_max_deviation: float
    identity_residual: float
    grid: RadialGrid
    nodes: np.ndarray
    delta_e: np.ndarray
    # max |closed-form dE - pointwise dE|, filled by oscillator.delta_e_formula
    expansion_residual: Optional[float] = None

    def solvable(self, threshold: float = 1e-8) -> bool:
        return self.delta_e_max_deviation <= threshold


def check_allowed(params: AmbiguityParams) -> None:
    """Raise unless params are BenDaniel-Duke (0, 0) or Zhu-Kroemer (-1/2, -1/2)."""
    if (params.alpha, params.gamma) not in ALLOWED:
        raise RestrictionError(
            f"(alpha, gamma) = ({params.alpha}, {params.gamma}) is not admitted by the splitting; "
            "only bendaniel-duke (0, 0) and zhu-kroemer (-1/2, -1/2) are"
        )


def _radial_term(setting: QuantumSetting, m, r):
    k = setting.radial_exponent
    if k == 0:
        return np.zeros_like(r)
    if np.any(r <= 0):
        raise DomainError("the radial correction needs r > 0")
    return k / (np.sqrt(m) * r)


def delta_w(profile: MassProfile, params: AmbiguityParams, setting: QuantumSetting, r):
    check_allowed(params)
    r = np.asarray(r, dtype=float)
    m, dm, _ = eval_mass(profile, r)
    return 0.5 * params.total * dm / m**1.5 - _radial_term(setting, m, r)


def delta_e_pointwise(profile, params, setting, w: SuperpotentialField, r):
    """dV - dW^2 + (dW/sqrt M)' - 2 W dW at each r."""
    check_allowed(params)
    r = np.asarray(r, dtype=float)
    dw = delta_w(profile, params, setting, r)

    def scaled(x):
        return delta_w(profile, params, setting, x) / np.sqrt(profile(x))

    return delta_v(profile, params, setting, r) - dw**2 + central_derivative(scaled, r) - 2.0 * w(r) * dw


def cross_term_bracket(profile, params, setting, r):
    """M'/(2 r M^2) * [(a+g)(N-1)/2 + (a+g+1) L], the claimed value of W dW + dE/2."""
    s = params.total
    coeff = 0.5 * s * (setting.N - 1) + (s + 1.0) * setting.L
    r = np.asarray(r, dtype=float)
    if coeff == 0:
        return np.zeros_like(r)
    m, dm, _ = eval_mass(profile, r)
    return dm / (2.0 * r * m**2) * coeff


def _identity_gap(profile, params, setting, w, r, delta_e):
    lhs = w(r) * delta_w(profile, params, setting, r)
    rhs = cross_term_bracket(profile, params, setting, r) - 0.5 * delta_e
    return float(np.max(np.abs(lhs - rhs)))


def _stats(values):
    mean = float(np.mean(values))
    return mean, float(np.max(np.abs(values - mean)))


def cross_term_check(profile, params, setting, w: SuperpotentialField, grid: RadialGrid) -> SplitReport:
    """Residual of W dW = bracket - dE/2 over every grid node."""
    r = grid.nodes
    de = delta_e_pointwise(profile, params, setting, w, r)
    mean, dev = _stats(de)
    return SplitReport(mean, dev, _identity_gap(profile, params, setting, w, r, de), grid, r, de)


def solvability_check(profile, params, setting, w: SuperpotentialField, grid: RadialGrid) -> SplitReport:
    """Tabulate dE on interior nodes; constancy means the split is exact."""
    r = grid.interior()
    de = delta_e_pointwise(profile, params, setting, w, r)
    mean, dev = _stats(de)
    return SplitReport(mean, dev, _identity_gap(profile, params, setting, w, r, de), grid, r, de)


def _g_closed(profile, params, setting, r):
    k = setting.radial_exponent
    if np.any(r < 0) and k != 0:
        raise DomainError("G needs r >= 0 in more than one dimension")
    radial = r**k if k != 0 else np.ones_like(r)
    if params.total == 0:
        return radial
    return radial * profile(r) ** (-0.5 * params.total)


def g_factor(profile, params, setting, r, mode: str = "closed"):
    """Correction factor G(r) = r^((N+2L-1)/2) M^(-(a+g)/2).

    ``mode="quadrature"`` integrates exp(-int sqrt(M) dW) from r0 = 1
    instead, scaled to the closed form at r0.  That path needs r > 0; the
    closed form also accepts r = 0.
    """
    check_allowed(params)
    r = np.asarray(r, dtype=float)
    if mode == "closed":
        return _g_closed(profile, params, setting, r)
    if mode != "quadrature":
        raise ValueError(f"mode must be 'closed' or 'quadrature', got {mode!r}")
    if np.any(r <= 0):
        raise DomainError("quadrature-mode G needs r > 0")

    def integrand(z):
        return np.sqrt(profile(z)) * delta_w(profile, params, setting, z)

    # accumulate segment by segment outward from r0 = 1 so each quadrature is short
    flat = np.atleast_1d(r).ravel()
    points, inverse = np.unique(flat, return_inverse=True)
    exponent = np.empty_like(points)
    above = np.flatnonzero(points >= 1.0)
    below = np.flatnonzero(points < 1.0)[::-1]
    for order in (above, below):
        acc, prev = 0.0, 1.0
        for i in order:
            acc += integrate(integrand, prev, points[i], tol=1e-13)
            prev = points[i]
            exponent[i] = acc
    g0 = float(_g_closed(profile, params, setting, np.array(1.0)))
    out = (g0 * np.exp(-exponent))[inverse].reshape(np.shape(r))
    return out[()] if out.ndim == 0 else out
