"""Check-function quantile estimators for spectrum estimates.

The empirical objective is the trapezoidal quadrature of rho_p(w - theta)
against periodogram ordinates.  Restricted to grid points, its forward
difference is proportional to G(theta) - p G(pi), where G is the weighted
cumulative mass, so the argmin is found exactly by inverting the cumulative
sum -- no objective scan needed.  The brute-force scan is kept as an oracle
and the two must agree grid-point for grid-point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sample import TimeSeries
from .spectral import LagWindow, Periodogram, raw_periodogram, smoothed_density


class DegenerateSpectrumError(ValueError):
    """Raised when a spectrum estimate carries no mass (all-zero ordinates)."""


@dataclass
class QuantileEstimate:
    """An estimated spectral quantile with its grid resolution."""

    p: float
    lambda_hat: float
    kind: str
    grid_step: float
    total_mass_hat: float
    window_meta: tuple[str, int] | None = None

    def __post_init__(self):
        if not -np.pi <= self.lambda_hat <= np.pi:
            raise ValueError(f"lambda_hat outside [-pi, pi]: {self.lambda_hat}")
        if self.kind == "smoothed" and self.window_meta is None:
            raise ValueError("smoothed estimates must carry window metadata")


def check_function(tau: float, u):
    """Asymmetric absolute loss u * (tau - 1{u < 0}); nonnegative for tau in [0, 1]."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    u = np.asarray(u, dtype=float)
    out = u * (tau - (u < 0.0))
    return out if out.ndim else float(out)


def _trapezoid_weights(grid: np.ndarray) -> np.ndarray:
    w = np.empty_like(grid)
    w[0] = (grid[1] - grid[0]) / 2.0
    w[-1] = (grid[-1] - grid[-2]) / 2.0
    w[1:-1] = (grid[2:] - grid[:-2]) / 2.0
    return w


def empirical_objective(pgram: Periodogram, p: float, theta: float) -> float:
    """Trapezoidal quadrature of rho_p(w - theta) against the ordinates."""
    if not -np.pi <= theta <= np.pi:
        raise ValueError(f"theta outside [-pi, pi]: {theta}")
    w = _trapezoid_weights(pgram.grid)
    return float(np.sum(w * check_function(p, pgram.grid - theta) * pgram.ordinates))


def _invert_cumulative(pgram: Periodogram, p: float) -> tuple[float, float]:
    # Smallest grid point where the weighted cumulative mass reaches p times
    # the total; this is the exact argmin of the trapezoidal objective, with
    # ties broken toward the smallest frequency.
    contrib = _trapezoid_weights(pgram.grid) * pgram.ordinates
    cum = np.cumsum(contrib)
    total = float(cum[-1])
    if total <= 0.0:
        raise DegenerateSpectrumError(
            f"all-zero {pgram.kind} spectrum estimate: cannot locate a quantile"
        )
    idx = int(np.searchsorted(cum, p * total, side="left"))
    idx = min(idx, cum.size - 1)
    return float(pgram.grid[idx]), total


def _grid_step(grid: np.ndarray) -> float:
    return float(np.median(np.diff(grid)))


def estimate_raw(series: TimeSeries, p: float, grid: np.ndarray | None = None) -> QuantileEstimate:
    """Quantile of the raw periodogram's cumulative mass."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    pgram = raw_periodogram(series, grid)
    lam, total = _invert_cumulative(pgram, p)
    return QuantileEstimate(
        p=p,
        lambda_hat=lam,
        kind="raw",
        grid_step=_grid_step(pgram.grid),
        total_mass_hat=total,
    )


def estimate_smoothed(
    series: TimeSeries,
    p: float,
    window: LagWindow,
    grid: np.ndarray | None = None,
) -> QuantileEstimate:
    """Quantile of the lag-window smoothed spectrum estimate."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    pgram = smoothed_density(series, window, grid)
    lam, total = _invert_cumulative(pgram, p)
    return QuantileEstimate(
        p=p,
        lambda_hat=lam,
        kind="smoothed",
        grid_step=_grid_step(pgram.grid),
        total_mass_hat=total,
        window_meta=pgram.window_meta,
    )


def argmin_crosscheck(pgram: Periodogram, p: float) -> float:
    """Brute-force oracle: evaluate the objective at every grid point and
    return the smallest minimizer.  O(grid^2); for testing, not production."""
    grid = pgram.grid
    w = _trapezoid_weights(grid)
    wy = w * pgram.ordinates
    if not np.any(wy > 0.0):
        raise DegenerateSpectrumError("all-zero spectrum estimate")
    best_val = np.inf
    best_theta = grid[0]
    block = max(1, 2_000_000 // grid.size)
    for start in range(0, grid.size, block):
        thetas = grid[start : start + block]
        u = grid[None, :] - thetas[:, None]
        vals = (u * (p - (u < 0.0))) @ wy
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val = float(vals[k])
            best_theta = float(thetas[k])
    return best_theta
