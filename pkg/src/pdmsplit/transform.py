"""Special-function substitution Phi(z) = H(g(z)) f(z) for the 1-D PDM problem.

H solves H'' + Q(g) H' + R(g) H = 0.  Matching the substituted equation
term by term fixes

    f = (M/g')^(1/2) exp((1/2) int^g Q dg)

and the energy prescription dV - dE = -(g'^2/M) R(g).  This module checks
given (g, M, H) triples against the 1-D equation; it does not solve for g.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.hermite import Hermite

from .calculus import RadialGrid, central_derivative, integrate
from .errors import DomainError
from .profiles import MassProfile, eval_mass

CHECK_INTERVAL = (-4.0, 4.0)
CHECK_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SpecialFunctionSpec:
    """A polynomial solution H of H'' + Q H' + R H = 0 with its derivatives.

    ``q_integral`` is an antiderivative of Q, used when given.
    """

    name: str
    Q: Callable
    R: Callable
    H: Callable
    dH: Callable
    d2H: Callable
    level: int
    q_integral: Optional[Callable] = None

    def __post_init__(self):
        residual = self.residual()
        if residual > CHECK_TOL:
            raise ValueError(f"{self.name}: H misses its equation by {residual:.3g} on {CHECK_INTERVAL}")

    def residual(self, interval=CHECK_INTERVAL, points: int = 801) -> float:
        g = np.linspace(*interval, points)
        return float(np.max(np.abs(self.d2H(g) + self.Q(g) * self.dH(g) + self.R(g) * self.H(g))))


def hermite(level: int) -> SpecialFunctionSpec:
    """Physicists' Hermite polynomial: Q = -2g, R = 2 level."""
    if int(level) != level or level < 0:
        raise ValueError("Hermite level must be a non-negative integer")
    poly = Hermite.basis(int(level))
    d1, d2 = poly.deriv(1), poly.deriv(2)
    return SpecialFunctionSpec(
        name=f"hermite-{level}",
        Q=lambda g: -2.0 * np.asarray(g, dtype=float),
        R=lambda g: np.full_like(np.asarray(g, dtype=float), 2.0 * level),
        H=poly,
        dH=d1,
        d2H=d2,
        level=int(level),
        q_integral=lambda g: -np.asarray(g, dtype=float) ** 2,
    )


@dataclass(frozen=True, eq=False)
class TransformSpec:
    g: Callable
    dg: Callable
    profile: MassProfile
    special: SpecialFunctionSpec

    def slope(self, z):
        slope = np.asarray(self.dg(np.asarray(z, dtype=float)), dtype=float)
        if np.any(slope <= 0):
            raise DomainError("the map g must be strictly increasing (g' > 0)")
        return slope


def linear_transform(profile: MassProfile, special: SpecialFunctionSpec, scale: float = 1.0) -> TransformSpec:
    """g(z) = scale * z."""
    return TransformSpec(
        g=lambda z: scale * np.asarray(z, dtype=float),
        dg=lambda z: np.full_like(np.asarray(z, dtype=float), scale),
        profile=profile,
        special=special,
    )


def oscillator_transform(profile: MassProfile, omega: float, level: int) -> TransformSpec:
    """g = sqrt(omega/2) int_0^z sqrt(M) with Hermite H; f is then the oscillator ground state."""
    c = np.sqrt(0.5 * omega)
    return TransformSpec(
        g=lambda z: c * profile.sqrt_integral(z),
        dg=lambda z: c * np.sqrt(profile(z)),
        profile=profile,
        special=hermite(level),
    )


def build_f(ts: TransformSpec, z, z0: float = 0.0):
    """f(z), normalized so f(z0) = (M(z0)/g'(z0))^(1/2)."""
    z = np.asarray(z, dtype=float)
    prefactor = np.sqrt(ts.profile(z) / ts.slope(z))
    g, g0 = ts.g(z), float(ts.g(np.asarray(z0)))
    if ts.special.q_integral is not None:
        area = ts.special.q_integral(g) - ts.special.q_integral(g0)
    else:
        area = np.vectorize(lambda b: integrate(ts.special.Q, g0, b))(g)
    return prefactor * np.exp(0.5 * area)


def phi(ts: TransformSpec, z):
    z = np.asarray(z, dtype=float)
    return ts.special.H(ts.g(z)) * build_f(ts, z)


def prescription_residual(ts: TransformSpec, delta_v, delta_e: float, grid: RadialGrid) -> float:
    """max |dV - dE + (g'^2/M) R(g)| over the grid."""
    z = grid.nodes
    rhs = ts.slope(z) ** 2 / ts.profile(z) * ts.special.R(ts.g(z))
    dv = np.broadcast_to(np.asarray(delta_v(z), dtype=float), z.shape)
    return float(np.max(np.abs(dv - delta_e + rhs)))


def apply_operator(profile: MassProfile, values: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """-((1/M) y')' on interior nodes by the midpoint flux stencil."""
    x, h = grid.nodes, grid.h
    inv_mid = 1.0 / profile(0.5 * (x[:-1] + x[1:]))
    flux = inv_mid * np.diff(values) / h
    return -np.diff(flux) / h


def assemble_phi_residual(ts: TransformSpec, v_eff, lam: float, grid: RadialGrid) -> float:
    """Relative residual of Phi = H(g) f in  -((1/M) Phi')' + V_eff Phi = lam Phi."""
    z = grid.nodes
    values = phi(ts, z)
    inner = z[1:-1]
    residual = apply_operator(ts.profile, values, grid) + (np.asarray(v_eff(inner)) - lam) * values[1:-1]
    return float(np.max(np.abs(residual)) / np.max(np.abs(values)))


def implied_potential(ts: TransformSpec, lam: float):
    """V_eff that makes Phi an eigenfunction at ``lam``, from the R matching condition.

    V = lam - (g'^2 R(g) - f''/f + (M'/M) f'/f) / M, with f derivatives by
    central differences.
    """

    def log_f(x):
        return np.log(build_f(ts, x))

    def potential(z):
        z = np.asarray(z, dtype=float)
        dlog = central_derivative(log_f, z)
        # f''/f = (log f)'' + ((log f)')^2
        ratio2 = central_derivative(log_f, z, order=2) + dlog**2
        m, dm, _ = eval_mass(ts.profile, z)
        return lam - (ts.slope(z) ** 2 * ts.special.R(ts.g(z)) - ratio2 + dm / m * dlog) / m

    return potential
