"""Effective potentials for the ordered PDM Hamiltonians in N dimensions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .profiles import MassProfile, eval_mass


@dataclass(frozen=True)
class AmbiguityParams:
    """Ordering exponents (alpha, gamma) of the kinetic operator."""

    alpha: float
    gamma: float
    name: str = "custom"
    canonical: bool = True

    @property
    def total(self) -> float:
        """alpha + gamma"""
        return self.alpha + self.gamma

    @classmethod
    def preset(cls, name: str) -> "AmbiguityParams":
        key = name.strip().lower().replace("_", "-").replace(" ", "-")
        try:
            return PRESETS[ALIASES.get(key, key)]
        except KeyError:
            raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


PRESETS = {
    "bendaniel-duke": AmbiguityParams(0.0, 0.0, "bendaniel-duke"),
    "zhu-kroemer": AmbiguityParams(-0.5, -0.5, "zhu-kroemer"),
    "li-kuhn": AmbiguityParams(0.0, -0.5, "li-kuhn"),
    # only alpha = -1 is pinned down for this ordering; gamma = 0 is a placeholder
    "bastard": AmbiguityParams(-1.0, 0.0, "bastard", canonical=False),
}
ALIASES = {"bdd": "bendaniel-duke", "zk": "zhu-kroemer", "lk": "li-kuhn"}

BENDANIEL_DUKE = PRESETS["bendaniel-duke"]
ZHU_KROEMER = PRESETS["zhu-kroemer"]


@dataclass(frozen=True)
class QuantumSetting:
    """Dimension N, angular momentum L, oscillator scale omega, level n."""

    N: int = 1
    L: int = 0
    omega: float = 2.0
    n: int = 0

    def __post_init__(self):
        for attr, low in (("N", 1), ("L", 0), ("n", 0)):
            value = getattr(self, attr)
            if int(value) != value or value < low:
                raise ValueError(f"{attr} must be an integer >= {low}, got {value}")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.N == 1 and self.L != 0:
            raise ValueError("the one-dimensional problem has L = 0")

    @property
    def radial_exponent(self) -> float:
        """(N + 2L - 1)/2, the power of r carried by the correction factor."""
        return 0.5 * (self.N + 2 * self.L - 1)

    @property
    def centrifugal(self) -> float:
        """L(L+N-2) + (N-1)(N-3)/4."""
        N, L = self.N, self.L
        return L * (L + N - 2) + 0.25 * (N - 1) * (N - 3)


def u_alpha_gamma(profile: MassProfile, params: AmbiguityParams, r):
    """Mass-ordering modification -(a+g)/2 M''/M^2 + (ag+a+g) M'^2/M^3."""
    m, dm, d2m = eval_mass(profile, r)
    a, g = params.alpha, params.gamma
    return -0.5 * (a + g) * d2m / m**2 + (a * g + a + g) * dm**2 / m**3


def delta_v(profile: MassProfile, params: AmbiguityParams, setting: QuantumSetting, r):
    """Ordering term plus the dimensional corrections of the radial problem.

    At N = 1 (so L = 0) both extra terms carry a zero coefficient and the
    result is exactly :func:`u_alpha_gamma`.
    """
    r = np.asarray(r, dtype=float)
    u = u_alpha_gamma(profile, params, r)
    if setting.N == 1:
        return u
    if np.any(r <= 0):
        raise DomainError("the radial effective potential needs r > 0")
    m, dm, _ = eval_mass(profile, r)
    return u - dm / m**2 * (setting.N - 1) / (2.0 * r) + setting.centrifugal / (m * r * r)


def u_eff(profile: MassProfile, params: AmbiguityParams, setting: QuantumSetting, v0, r):
    """Full effective potential V0 + delta_v."""
    r = np.asarray(r, dtype=float)
    return np.asarray(v0(r), dtype=float) + delta_v(profile, params, setting, r)
