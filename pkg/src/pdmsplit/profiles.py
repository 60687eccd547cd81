"""Dimensionless mass functions M(r) with analytic derivatives."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .calculus import CumulativeTable, RadialGrid, central_derivative, cumulative_integral
from .errors import DomainError

HALF_LINE = "half-line"
FULL_LINE = "full-line"

# span of the fallback sqrt-integral table for profiles without a closed form
_TABLE_SPAN = 64.0
_TABLE_NODES = 16001


@dataclass(frozen=True, eq=False)
class MassProfile:
    """A smooth positive mass function and its first two derivatives.

    ``closed_sqrt_integral`` is ``r -> integral_0^r sqrt(M)`` when known in
    closed form; otherwise :meth:`sqrt_integral` falls back to a table.
    """

    name: str
    m: Callable
    dm: Callable
    d2m: Callable
    params: dict = field(default_factory=dict)
    closed_sqrt_integral: Optional[Callable] = None
    domain: str = FULL_LINE

    def __post_init__(self):
        if self.domain not in (HALF_LINE, FULL_LINE):
            raise ValueError(f"unknown domain {self.domain!r}")
        object.__setattr__(self, "_table", None)

    def label(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.name}({inner})"

    def check_domain(self, r):
        r = np.asarray(r, dtype=float)
        if not np.all(np.isfinite(r)):
            raise DomainError(f"{self.name}: non-finite r")
        if self.domain == HALF_LINE and np.any(r <= 0):
            raise DomainError(f"{self.name} is defined for r > 0 only")
        return r

    def __call__(self, r):
        return self.m(self.check_domain(r))

    def sqrt_integral(self, r):
        """``integral_0^r sqrt(M(z)) dz``, closed form when available."""
        r = np.asarray(r, dtype=float)
        if self.closed_sqrt_integral is not None:
            return self.closed_sqrt_integral(r)
        table = self._table
        if table is None:
            lo = -_TABLE_SPAN if self.domain == FULL_LINE else 0.0
            grid = RadialGrid(lo, _TABLE_SPAN, _TABLE_NODES)
            table = CumulativeTable(lambda z: np.sqrt(self.m(z)), grid)
            object.__setattr__(self, "_table", table)
        return table(r)


def eval_mass(profile: MassProfile, r):
    """Return ``(M, M', M'')`` at ``r``."""
    r = profile.check_domain(r)
    return profile.m(r), profile.dm(r), profile.d2m(r)


def _ones(r):
    return np.ones_like(np.asarray(r, dtype=float))


def _zeros(r):
    return np.zeros_like(np.asarray(r, dtype=float))


def constant() -> MassProfile:
    return MassProfile("constant", _ones, _zeros, _zeros, closed_sqrt_integral=lambda r: np.asarray(r, dtype=float))


def rational(a: float = 2.0) -> MassProfile:
    """``M = ((a + r^2) / (1 + r^2))^2``; sqrt(M) tends to a at 0 and 1 at infinity."""
    if not a > 0:
        raise ValueError(f"rational profile needs a > 0, got {a}")

    def s(r):
        return (a + r * r) / (1.0 + r * r)

    def ds(r):
        return 2.0 * r * (1.0 - a) / (1.0 + r * r) ** 2

    def d2s(r):
        return 2.0 * (1.0 - a) * (1.0 - 3.0 * r * r) / (1.0 + r * r) ** 3

    return MassProfile(
        "rational",
        m=lambda r: s(r) ** 2,
        dm=lambda r: 2.0 * s(r) * ds(r),
        d2m=lambda r: 2.0 * ds(r) ** 2 + 2.0 * s(r) * d2s(r),
        params={"a": float(a)},
        closed_sqrt_integral=lambda r: r + (a - 1.0) * np.arctan(r),
    )


def inverse_quadratic() -> MassProfile:
    """``M = 1 / (1 + r^2)``."""
    return MassProfile(
        "inverse-quadratic",
        m=lambda r: 1.0 / (1.0 + r * r),
        dm=lambda r: -2.0 * r / (1.0 + r * r) ** 2,
        d2m=lambda r: (6.0 * r * r - 2.0) / (1.0 + r * r) ** 3,
        closed_sqrt_integral=np.arcsinh,
    )


BUILTINS = {
    "constant": constant,
    "rational": rational,
    "inverse-quadratic": inverse_quadratic,
}


def get_profile(name: str, **params) -> MassProfile:
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise ValueError(f"unknown mass profile {name!r}; choose from {sorted(BUILTINS)}") from None
    return factory(**params)


def builtin_profiles() -> list:
    """Default instances of every built-in profile, in a fixed order."""
    return [constant(), rational(2.0), inverse_quadratic()]


@dataclass
class ValidationReport:
    profile: str
    positivity_violations: np.ndarray
    derivative_error: float
    second_derivative_error: float
    sqrt_integral_error: Optional[float]
    tolerance: float = 1e-6
    integral_tolerance: float = 1e-8

    @property
    def positive(self) -> bool:
        return self.positivity_violations.size == 0

    @property
    def ok(self) -> bool:
        derivs = max(self.derivative_error, self.second_derivative_error) <= self.tolerance
        integral = self.sqrt_integral_error is None or self.sqrt_integral_error <= self.integral_tolerance
        return self.positive and derivs and integral


def _relative_gap(analytic, numeric):
    scale = np.maximum(1.0, np.abs(numeric))
    return float(np.max(np.abs(analytic - numeric) / scale))


def validate_profile(profile: MassProfile, grid: RadialGrid) -> ValidationReport:
    """Check positivity, derivative consistency and the closed sqrt-integral.

    Derivative errors are relative, measured against fourth-order central
    differences of ``m`` with the denominator floored at 1.  Findings go in
    the report; nothing is raised for a failing profile.
    """
    r = profile.check_domain(grid.nodes)
    m = profile.m(r)
    violations = r[~(m > 0)]
    pos = m > 0
    if np.any(pos):
        d1 = _relative_gap(profile.dm(r[pos]), central_derivative(profile.m, r[pos], 1))
        d2 = _relative_gap(profile.d2m(r[pos]), central_derivative(profile.m, r[pos], 2))
    else:
        d1 = d2 = float("inf")

    integral_err = None
    if profile.closed_sqrt_integral is not None and violations.size == 0:
        numeric = cumulative_integral(lambda z: np.sqrt(profile.m(z)), grid)
        integral_err = float(np.max(np.abs(numeric - profile.closed_sqrt_integral(r))))
    return ValidationReport(profile.label(), violations, d1, d2, integral_err)
