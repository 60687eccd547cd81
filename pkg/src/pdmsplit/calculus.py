"""Finite differences, adaptive quadrature and tabulated cumulative integrals.

All callables passed in here are expected to accept numpy arrays and act
elementwise; scalar-returning callables (``lambda x: 1.0``) are broadcast.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import AccuracyError, EvaluationError

MAX_DEPTH = 48


@dataclass(frozen=True)
class RadialGrid:
    """Uniform grid ``r_min + i*h`` for ``i in range(count)``.

    ``r_min`` may be negative for full-line (1-D) problems.
    """

    r_min: float
    r_max: float
    count: int

    def __post_init__(self):
        if not (np.isfinite(self.r_min) and np.isfinite(self.r_max)):
            raise ValueError("grid bounds must be finite")
        if self.r_min >= self.r_max:
            raise ValueError(f"r_min={self.r_min} must be below r_max={self.r_max}")
        if int(self.count) != self.count or self.count < 16:
            raise ValueError(f"grid needs an integer count >= 16, got {self.count}")

    @property
    def h(self) -> float:
        return (self.r_max - self.r_min) / (self.count - 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        return self.r_min + self.h * np.arange(self.count)

    def interior(self, margin: int = 2) -> np.ndarray:
        """Nodes with ``margin`` points dropped at each end."""
        return self.nodes[margin : self.count - margin]

    def halved(self) -> "RadialGrid":
        """Same interval with half the spacing."""
        return RadialGrid(self.r_min, self.r_max, 2 * (self.count - 1) + 1)


def _evaluate(f, x):
    x = np.asarray(x, dtype=float)
    y = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    if not np.all(np.isfinite(y)):
        bad = np.atleast_1d(x)[~np.isfinite(np.atleast_1d(y))]
        raise EvaluationError(f"non-finite function value at x={bad[:3]}")
    return y


def default_step(r, order: int = 1):
    """Step used by :func:`central_derivative` when none is given.

    First derivatives use 1e-4 * max(1, |r|).  Second derivatives need a
    wider step, 1e-2 * max(1, |r|), otherwise cancellation in the five-point
    stencil dominates the truncation error.
    """
    scale = 1e-4 if order == 1 else 1e-2
    return scale * np.maximum(1.0, np.abs(r))


def central_derivative(f, r, order: int = 1, h=None):
    """Fourth-order central difference of ``f`` at ``r`` (scalar or array)."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    r = np.asarray(r, dtype=float)
    h = default_step(r, order) if h is None else np.asarray(h, dtype=float)
    if np.any(h <= 0):
        raise ValueError("step must be positive")
    fp1 = _evaluate(f, r + h)
    fm1 = _evaluate(f, r - h)
    fp2 = _evaluate(f, r + 2 * h)
    fm2 = _evaluate(f, r - 2 * h)
    if order == 1:
        out = (fm2 - fp2 + 8.0 * (fp1 - fm1)) / (12.0 * h)
    else:
        out = (-fp2 + 16.0 * fp1 - 30.0 * _evaluate(f, r) + 16.0 * fm1 - fm2) / (12.0 * h * h)
    return out[()] if out.ndim == 0 else out


def adaptive_quadrature(f, a: float, b: float, tol: float = 1e-10, max_depth: int = MAX_DEPTH) -> float:
    """Adaptive Simpson integral of ``f`` over [a, b].

    Intervals are refined breadth first so that ``f`` is called on whole
    batches of abscissae.  Each bisection halves the local tolerance; an
    interval accepts when the two-half estimate differs from the whole by at
    most 15x its tolerance, and the Richardson correction is added.

    Raises AccuracyError (with ``.estimate``) when some interval reaches
    ``max_depth`` bisections without converging.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if a > b:
        raise ValueError(f"need a <= b, got a={a}, b={b}")
    if a == b:
        return 0.0

    lo = np.array([a], dtype=float)
    hi = np.array([b], dtype=float)
    f_lo, f_mid, f_hi = (_evaluate(f, x) for x in (lo, 0.5 * (lo + hi), hi))
    whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi)
    local_tol = np.array([tol])
    total = 0.0
    exhausted = False

    for depth in range(max_depth + 1):
        mid = 0.5 * (lo + hi)
        f_q1 = _evaluate(f, 0.5 * (lo + mid))
        f_q3 = _evaluate(f, 0.5 * (mid + hi))
        left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_q1 + f_mid)
        right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_q3 + f_hi)
        delta = left + right - whole
        done = np.abs(delta) <= 15.0 * local_tol
        if depth == max_depth:
            exhausted = not np.all(done)
            done[:] = True
        total += float(np.sum((left + right + delta / 15.0)[done]))
        keep = ~done
        if not np.any(keep):
            break
        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        f_lo, f_q1, f_mid, f_q3, f_hi = f_lo[keep], f_q1[keep], f_mid[keep], f_q3[keep], f_hi[keep]
        left, right, local_tol = left[keep], right[keep], 0.5 * local_tol[keep]
        lo = np.concatenate([lo, mid])
        hi = np.concatenate([mid, hi])
        f_lo, f_mid, f_hi = (
            np.concatenate([f_lo, f_mid]),
            np.concatenate([f_q1, f_q3]),
            np.concatenate([f_mid, f_hi]),
        )
        whole = np.concatenate([left, right])
        local_tol = np.concatenate([local_tol, local_tol])

    if exhausted:
        raise AccuracyError(
            f"adaptive Simpson hit depth {max_depth} before tol={tol} on [{a}, {b}]", total
        )
    return total


def integrate(f, a: float, b: float, tol: float = 1e-10) -> float:
    """Oriented integral: ``-integrate(f, b, a)`` when ``a > b``."""
    if a <= b:
        return adaptive_quadrature(f, a, b, tol)
    return -adaptive_quadrature(f, b, a, tol)


def cumulative_integral(f, grid: RadialGrid, subdivisions: int = 8, tol: float = 1e-12) -> np.ndarray:
    """Tabulate ``I(r_i) = integral of f from 0 to r_i`` on the grid nodes.

    Each cell is integrated by composite Simpson on ``subdivisions`` (even)
    sub-intervals; the offset from 0 to the first node uses adaptive
    quadrature, so grids need not contain the origin.
    """
    if subdivisions < 2 or subdivisions % 2:
        raise ValueError("subdivisions must be an even integer >= 2")
    x = grid.nodes
    fine = np.linspace(grid.r_min, grid.r_max, (grid.count - 1) * subdivisions + 1)
    y = _evaluate(f, fine).reshape(-1)
    # Simpson weights 1,4,2,4,...,4,1 per cell
    cells = y[:-1].reshape(grid.count - 1, subdivisions)
    ends = y[subdivisions::subdivisions]
    odd = cells[:, 1::2].sum(axis=1)
    even = cells[:, 2::2].sum(axis=1)
    step = grid.h / subdivisions
    per_cell = step / 3.0 * (cells[:, 0] + 4.0 * odd + 2.0 * even + ends)
    out = np.empty(grid.count)
    out[0] = integrate(f, 0.0, float(x[0]), tol)
    out[1:] = out[0] + np.cumsum(per_cell)
    return out


class CumulativeTable:
    """Cumulative integral from 0, tabulated once and interpolated.

    Interpolation is cubic Hermite using the integrand itself as the node
    derivative, which keeps finite differences of the table accurate.
    """

    def __init__(self, f, grid: RadialGrid):
        self.grid = grid
        values = cumulative_integral(f, grid)
        slopes = _evaluate(f, grid.nodes)
        self._spline = CubicHermiteSpline(grid.nodes, values, slopes, extrapolate=False)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < self.grid.r_min) or np.any(r > self.grid.r_max):
            raise EvaluationError(
                f"cumulative table covers [{self.grid.r_min}, {self.grid.r_max}] only"
            )
        out = self._spline(r)
        return out[()] if np.ndim(out) == 0 else out
