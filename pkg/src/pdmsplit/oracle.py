"""Finite-difference eigenvalue oracle for the Hermitian PDM problem.

Two discretizations of  -((1/M) Psi')' + U Psi = E Psi  are provided, both
in flux form (1/M at cell midpoints) so the matrices are exactly symmetric:

* :func:`discretize` works on the nodes of a uniform grid with Dirichlet
  ends.  It is the 1-D (full line) solver.
* :func:`discretize_radial` substitutes Psi = r^((N-1)/2) R and works with
  the measure r^(N-1) on a cell-centred half-line grid.  R is regular at
  the origin for every N >= 2, including the marginal N = 2, L = 0 barrier
  -1/(4 r^2) on which the plain Dirichlet scheme converges only
  logarithmically.

Eigenvalues come from bisection on the Sturm sequence count.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit
from scipy.linalg import solve_banded

from .calculus import RadialGrid
from .errors import EvaluationError
from .oscillator import SpectralResult, unperturbed_potential
from .potentials import AmbiguityParams, QuantumSetting, u_eff
from .profiles import MassProfile, eval_mass

DEFAULT_NODES = 4000
DEFAULT_LEVELS = 2
DEFAULT_K = 8
DEFAULT_TOL = 5e-5


@dataclass(frozen=True, eq=False)
class TridiagonalOperator:
    """Symmetric tridiagonal matrix; one off-diagonal array serves both triangles."""

    diag: np.ndarray
    offdiag: np.ndarray
    grid: RadialGrid
    nodes: np.ndarray
    boundary: str = "dirichlet"

    def __post_init__(self):
        if self.offdiag.shape != (self.diag.size - 1,):
            raise ValueError("off-diagonal must have length K - 1")
        if not (np.all(np.isfinite(self.diag)) and np.all(np.isfinite(self.offdiag))):
            raise EvaluationError("operator has non-finite entries")

    @property
    def size(self) -> int:
        return self.diag.size

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def gershgorin(self):
        radius = np.zeros_like(self.diag)
        radius[:-1] += np.abs(self.offdiag)
        radius[1:] += np.abs(self.offdiag)
        return float(np.min(self.diag - radius)), float(np.max(self.diag + radius))

    def shifted(self, c: float) -> "TridiagonalOperator":
        return dataclasses.replace(self, diag=self.diag + c)


def from_arrays(diag, offdiag) -> TridiagonalOperator:
    """Wrap plain arrays (no grid attached), e.g. for small hand-built matrices."""
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    return TridiagonalOperator(diag, offdiag, grid=None, nodes=np.arange(diag.size, dtype=float))


def _eval_potential(potential, x):
    u = np.broadcast_to(np.asarray(potential(x), dtype=float), x.shape)
    if not np.all(np.isfinite(u)):
        raise EvaluationError("potential is not finite on the grid; start the grid away from singular points")
    return u


def discretize(profile: MassProfile, potential, grid: RadialGrid) -> TridiagonalOperator:
    """Node-based flux-form operator on the interior nodes, Dirichlet at both ends."""
    x = grid.nodes
    h = grid.h
    inv_mid = 1.0 / profile(0.5 * (x[:-1] + x[1:]))
    inner = x[1:-1]
    diag = (inv_mid[:-1] + inv_mid[1:]) / h**2 + _eval_potential(potential, inner)
    offdiag = -inv_mid[1:-1] / h**2
    return TridiagonalOperator(diag, offdiag, grid, inner)


def radial_correction(profile: MassProfile, setting: QuantumSetting, r):
    """Potential shift produced by Psi = r^q R with q = (N-1)/2.

    The weighted operator for R carries U + q M'/(r M^2) - q(q-1)/(M r^2).
    """
    q = 0.5 * (setting.N - 1)
    m, dm, _ = eval_mass(profile, r)
    return q * dm / (r * m**2) - q * (q - 1.0) / (m * r * r)


def discretize_radial(
    profile: MassProfile, potential, setting: QuantumSetting, r_max: float, cells: int
) -> TridiagonalOperator:
    """Cell-centred operator in the measure r^(N-1) for N >= 2.

    ``potential`` is the Psi-form effective potential; the conjugation shift
    from :func:`radial_correction` is added here.  The face at r = 0 carries
    zero flux weight, the outer end is Dirichlet.
    """
    if setting.N < 2:
        raise ValueError("use discretize() on the full line for N = 1")
    h = r_max / cells
    centres = (np.arange(cells) + 0.5) * h
    faces = np.arange(cells + 1) * h
    power = setting.N - 1
    flux = faces**power / profile(faces)
    weight = centres**power
    u = _eval_potential(potential, centres) + radial_correction(profile, setting, centres)
    diag = (flux[:-1] + flux[1:]) / h**2 / weight + u
    offdiag = -flux[1:-1] / h**2 / np.sqrt(weight[:-1] * weight[1:])
    grid = RadialGrid(centres[0], centres[-1], cells)
    return TridiagonalOperator(diag, offdiag, grid, centres, boundary="regular-origin/dirichlet")


@njit(cache=True)
def _sturm(diag, off2, x, pivmin):
    count = 0
    q = diag[0] - x
    if abs(q) <= pivmin:
        q = -pivmin
    if q < 0.0:
        count += 1
    for i in range(1, diag.size):
        q = diag[i] - x - off2[i - 1] / q
        if abs(q) <= pivmin:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


@njit(cache=True)
def _bisect(diag, off2, k, lo, hi, pivmin, abs_tol):
    eps = 2.220446049250313e-16
    out = np.empty(k)
    left = lo
    for j in range(k):
        a = left
        b = hi
        while b - a > max(abs_tol, 2.0 * eps * max(abs(a), abs(b))):
            mid = 0.5 * (a + b)
            if mid <= a or mid >= b:
                break
            if _sturm(diag, off2, mid, pivmin) > j:
                b = mid
            else:
                a = mid
        # b is the smallest probe whose count includes eigenvalue j
        out[j] = b
        left = a
    return out


def _pivmin(op):
    off2 = op.offdiag**2
    return off2, np.finfo(float).tiny * max(1.0, float(np.max(off2)) if off2.size else 1.0)


def sturm_count(op: TridiagonalOperator, x: float) -> int:
    """Number of eigenvalues strictly below ``x``."""
    off2, pivmin = _pivmin(op)
    return int(_sturm(op.diag, off2, float(x), pivmin))


def lowest_eigenvalues(op: TridiagonalOperator, k: int, tol: float = 0.0) -> np.ndarray:
    """The ``k`` smallest eigenvalues in ascending order.

    Each is bisected inside the Gershgorin interval until the bracket is
    below ``tol`` or cannot be split in floating point (the default), which
    is far inside 1e-10 * max(1, Gershgorin radius).  The upper bracket end
    is returned, so representable eigenvalues come back exactly.
    """
    if not 1 <= k <= op.size:
        raise ValueError(f"k must lie in [1, {op.size}], got {k}")
    low, high = op.gershgorin()
    pad = 1e-12 * max(1.0, abs(low), abs(high))
    off2, pivmin = _pivmin(op)
    return _bisect(op.diag, off2, int(k), low - pad, high + pad, pivmin, float(tol))


def eigenvector(op: TridiagonalOperator, eigenvalue: float, sweeps: int = 2) -> np.ndarray:
    """Inverse iteration at a computed eigenvalue; unit 2-norm, positive first lobe."""
    n = op.size
    shift = eigenvalue + 1e-10 * max(1.0, abs(eigenvalue))
    bands = np.zeros((3, n))
    bands[0, 1:] = op.offdiag
    bands[1] = op.diag - shift
    bands[2, :-1] = op.offdiag
    vec = np.ones(n) / np.sqrt(n)
    for _ in range(1 + sweeps):
        vec = solve_banded((1, 1), bands, vec)
        vec /= np.linalg.norm(vec)
    peak = np.argmax(np.abs(vec))
    return vec if vec[peak] > 0 else -vec


def richardson(levels) -> np.ndarray:
    """Extrapolate eigenvalue arrays from successive grid halvings, O(h^2) leading error."""
    table = [np.asarray(v, dtype=float) for v in levels]
    power = 4.0
    while len(table) > 1:
        table = [(power * fine - coarse) / (power - 1.0) for coarse, fine in zip(table, table[1:])]
        power *= 4.0
    return table[0]


def _refined(build, levels: int, k: int):
    if levels not in (1, 2, 3):
        raise ValueError("levels must be 1, 2 or 3")
    raw = [lowest_eigenvalues(build(i), k) for i in range(levels)]
    estimate = np.abs(raw[-1] - raw[-2]) if levels > 1 else np.full(k, np.nan)
    return richardson(raw), estimate


def refine(profile: MassProfile, potential, base_grid: RadialGrid, levels: int = DEFAULT_LEVELS, k: int = 5):
    """Richardson-extrapolated eigenvalues on ``base_grid`` and its halvings.

    Returns ``(eigenvalues, estimate)`` with the estimate taken as the
    spread of the two finest raw levels.
    """
    grids = [base_grid]
    for _ in range(levels - 1):
        grids.append(grids[-1].halved())
    return _refined(lambda i: discretize(profile, potential, grids[i]), levels, k)


def refine_radial(profile, potential, setting, r_max, cells=DEFAULT_NODES, levels=DEFAULT_LEVELS, k=DEFAULT_K):
    return _refined(
        lambda i: discretize_radial(profile, potential, setting, r_max, cells * 2**i), levels, k
    )


def default_r_max(profile: MassProfile, omega: float, span: float = 60.0) -> float:
    """12 / sqrt(omega * min sqrt(M)) clipped to [10, 60]."""
    probe = np.linspace(0.0, span, 1201)
    low = float(np.min(np.sqrt(profile(probe))))
    return float(np.clip(12.0 / np.sqrt(omega * low), 10.0, 60.0))


def oracle_spectrum(
    profile: MassProfile,
    params: AmbiguityParams,
    setting: QuantumSetting,
    nodes: int = DEFAULT_NODES,
    r_max: Optional[float] = None,
    levels: int = DEFAULT_LEVELS,
    k: int = DEFAULT_K,
):
    """Lowest ``k`` eigenvalues of the full problem with V0 from the oscillator W.

    N = 1 is solved on [-r_max, r_max]; N >= 2 on the half line.
    """
    R = default_r_max(profile, setting.omega) if r_max is None else float(r_max)

    def potential(r):
        return u_eff(profile, params, setting, lambda x: unperturbed_potential(profile, setting.omega, x), r)

    if setting.N == 1:
        return refine(profile, potential, RadialGrid(-R, R, nodes), levels, k)
    return refine_radial(profile, potential, setting, R, nodes, levels, k)


def verify_against_analytic(
    result: SpectralResult,
    profile: MassProfile,
    params: AmbiguityParams,
    setting: QuantumSetting,
    nodes: int = DEFAULT_NODES,
    r_max: Optional[float] = None,
    levels: int = DEFAULT_LEVELS,
    k: int = DEFAULT_K,
    tol: float = DEFAULT_TOL,
) -> SpectralResult:
    """Attach the oracle eigenvalue nearest ``result.total_e`` and membership.

    Membership is true when ``total_e`` lies within ``tol`` of any of the
    lowest ``k`` oracle eigenvalues.
    """
    values, estimate = oracle_spectrum(profile, params, setting, nodes, r_max, levels, k)
    gaps = np.abs(values - result.total_e)
    nearest = int(np.argmin(gaps))
    return dataclasses.replace(
        result,
        oracle_e=float(values[nearest]),
        abs_err=float(gaps[nearest]),
        membership=bool(np.any(gaps <= tol)),
        oracle_estimate=float(estimate[nearest]),
        oracle_spectrum=values,
    )
