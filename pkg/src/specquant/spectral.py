"""Sample autocovariances, periodograms, and lag-window smoothing.

Conventions: autocovariances use the 1/n divisor, which makes the raw
periodogram identical to the lag sum (1/2pi) sum_h C(h) exp(-ih w) and keeps
it nonnegative.  The smoothed estimate applies a lag window to the first m
autocovariances, normalized so that its integral over [-pi, pi] equals C(0);
quantile estimates are invariant to this overall scale.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import fft as sfft

from .sample import TimeSeries

TWO_PI = 2.0 * np.pi


@dataclass
class Periodogram:
    """Nonnegative spectrum estimate on an increasing frequency grid."""

    grid: np.ndarray
    ordinates: np.ndarray
    kind: str
    n: int
    window_meta: tuple[str, int] | None = None
    n_clamped: int = 0

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.ordinates = np.asarray(self.ordinates, dtype=float)
        if self.grid.ndim != 1 or self.grid.size == 0:
            raise ValueError("grid must be a non-empty 1-d array")
        if self.grid.shape != self.ordinates.shape:
            raise ValueError("grid and ordinates must have matching shapes")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if np.any(np.abs(self.grid) > np.pi + 1e-12):
            raise ValueError("grid must lie inside [-pi, pi]")


@dataclass(frozen=True)
class LagWindow:
    """Lag-window shape on [-1, 1] with truncation point m.

    The shape must satisfy shape(0) = 1, shape(-x) = shape(x), |shape| <= 1,
    and shape(x) = 0 for |x| > 1; :func:`bartlett_window` is the shipped
    instance and the tests check these constraints.
    """

    name: str
    shape: Callable[[np.ndarray], np.ndarray]
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"bandwidth m must be >= 1, got {self.m}")


def bartlett_window(m: int) -> LagWindow:
    """Triangular lag window: shape(x) = 1 - |x| on [-1, 1], zero outside."""
    if m < 1:
        raise ValueError(f"bandwidth m must be >= 1, got {m}")

    def shape(x):
        x = np.asarray(x, dtype=float)
        out = np.maximum(1.0 - np.abs(x), 0.0)
        return out if out.ndim else float(out)

    return LagWindow(name="bartlett", shape=shape, m=m)


def default_bandwidth(n: int) -> int:
    """Default truncation point floor(n**0.4); grows with n, negligibly vs n."""
    return max(1, int(n**0.4))


def default_grid(n: int) -> np.ndarray:
    """Symmetric lattice {pi k / n : k = -n..n}, twice as fine as the Fourier grid."""
    return np.pi * np.arange(-n, n + 1) / n


def _values(series) -> np.ndarray:
    if isinstance(series, TimeSeries):
        return series.values
    return np.asarray(series, dtype=float)


def autocovariance(series, max_lag: int) -> np.ndarray:
    """Sample autocovariances C(h) = (1/n) sum_s x_s x_(s+h), h = 0..max_lag.

    Computed by FFT convolution in O(n log n); agrees with the direct double
    loop to floating-point accuracy.
    """
    x = _values(series)
    n = x.size
    if not 0 <= max_lag < n:
        raise ValueError(f"max_lag must satisfy 0 <= max_lag < n, got {max_lag} (n={n})")
    size = sfft.next_fast_len(2 * n - 1)
    f = sfft.rfft(x, size)
    acov = sfft.irfft(f * np.conj(f), size)[: max_lag + 1] / n
    return acov


def raw_periodogram(series, grid: np.ndarray | None = None) -> Periodogram:
    """Periodogram (1/2pi n) |sum_j x_j exp(i j w)|^2 on ``grid``.

    With the default lattice the ordinates come from one zero-padded FFT; an
    explicit grid is evaluated directly (and is what the brute-force test
    oracles use).
    """
    x = _values(series)
    n = x.size
    if grid is None:
        grid = default_grid(n)
        spec = np.abs(sfft.rfft(x, 2 * n)) ** 2 / (TWO_PI * n)
        ords = np.concatenate((spec[:0:-1], spec))
    else:
        grid = np.asarray(grid, dtype=float)
        if grid.size == 0:
            raise ValueError("grid must be non-empty")
        t = np.arange(1, n + 1, dtype=float)
        ords = np.empty_like(grid)
        block = max(1, 4_000_000 // max(n, 1))
        for start in range(0, grid.size, block):
            sl = slice(start, start + block)
            basis = np.exp(1j * np.outer(grid[sl], t))
            ords[sl] = np.abs(basis @ x) ** 2 / (TWO_PI * n)
    return Periodogram(grid=grid, ordinates=ords, kind="raw", n=n)


def extended_periodogram(series, grid: np.ndarray | None = None) -> Periodogram:
    """Lag-sum spectrum sum_{|h|<n} C(h) exp(-ih w); equals 2pi times the raw one."""
    pgram = raw_periodogram(series, grid)
    return Periodogram(
        grid=pgram.grid,
        ordinates=TWO_PI * pgram.ordinates,
        kind="extended",
        n=pgram.n,
    )


def smoothed_density(
    series,
    window: LagWindow,
    grid: np.ndarray | None = None,
    clamp: bool = True,
) -> Periodogram:
    """Lag-window spectrum estimate (1/2pi) sum_{|h|<=m} shape(h/m) C(h) exp(-ih w).

    The Bartlett window yields nonnegative ordinates up to rounding; other
    windows may go negative, in which case negatives are clamped to zero and
    counted in ``n_clamped`` (with a warning).  Set ``clamp=False`` to inspect
    the signed values.
    """
    x = _values(series)
    n = x.size
    m = window.m
    if m >= n:
        raise ValueError(f"window bandwidth m={m} must be < n={n}")
    if grid is None:
        grid = default_grid(n)
    else:
        grid = np.asarray(grid, dtype=float)

    lags = np.arange(0, m + 1)
    weights = np.asarray(window.shape(lags / m), dtype=float)
    acov = autocovariance(x, m)
    coef = weights * acov
    # Symmetric lag sum: C(0) term plus twice the cosine terms for h >= 1.
    ords = (coef[0] + 2.0 * (np.cos(np.outer(grid, lags[1:])) @ coef[1:])) / TWO_PI

    n_clamped = 0
    if clamp:
        neg = ords < 0.0
        n_clamped = int(np.count_nonzero(neg))
        if n_clamped and window.name != "bartlett":
            warnings.warn(
                f"clamped {n_clamped} negative ordinates from window {window.name!r}",
                stacklevel=2,
            )
        ords = np.maximum(ords, 0.0)

    return Periodogram(
        grid=grid,
        ordinates=ords,
        kind="smoothed",
        n=n,
        window_meta=(window.name, m),
        n_clamped=n_clamped,
    )


def save_periodogram(pgram: Periodogram, path) -> None:
    """Two-column CSV (frequency, ordinate) with a comment header."""
    path = Path(path)
    meta = f"kind={pgram.kind} n={pgram.n}"
    if pgram.window_meta is not None:
        meta += f" window={pgram.window_meta[0]} m={pgram.window_meta[1]}"
    with path.open("w") as fh:
        fh.write(f"# {meta}\n")
        fh.write("frequency,ordinate\n")
        for w, y in zip(pgram.grid, pgram.ordinates):
            fh.write(f"{w!r},{y!r}\n")
