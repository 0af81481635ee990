"""Seeded simulation of the model families.

Generation is a pure function of (model, n, seed): one ``numpy`` PCG64 stream
per series, with sinusoid phases drawn first (one uniform draw per component)
followed by the Gaussian noise.  Replicate seeds are derived from a base seed
with a splitmix64 mix, so batches are reproducible and order-independent.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.signal import lfilter

from .models import AR1, MA1, SpectralModel, WhiteNoise, describe

_MASK64 = (1 << 64) - 1


def derive_seed(base_seed: int, index: int) -> int:
    """Replicate seed for the ``index``-th stream under ``base_seed``.

    splitmix64 finalizer applied to base_seed + (index+1) * golden-gamma; the
    step constant is odd, so distinct indices give distinct seeds.
    """
    z = (int(base_seed) + (int(index) + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


@dataclass
class TimeSeries:
    """An observed stretch of a simulated (or imported) process."""

    values: np.ndarray
    seed: int = 0
    model_tag: str = "manual"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size < 2:
            raise ValueError("series must be one-dimensional with length >= 2")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("series contains non-finite values")

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class SimulationPlan:
    """A replicated simulation design."""

    model: SpectralModel
    n: int
    replications: int = 1
    base_seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")


def generate(model: SpectralModel, n: int, seed: int) -> TimeSeries:
    """Simulate ``n`` observations from ``model``, deterministically in ``seed``.

    White noise is i.i.d. N(0, v).  MA(1) uses one burn-in innovation.  AR(1)
    starts from its stationary law N(0, v/(1-a^2)), so even very short series
    are exactly stationary.  Each sinusoid component adds R cos(lam t + phi)
    for t = 1..n with its own phase phi ~ Uniform(-pi, pi), drawn before the
    noise and therefore independent of it.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    rng = np.random.default_rng(seed)
    phases = rng.uniform(-np.pi, np.pi, size=len(model.atoms))

    noise = model.noise
    sd = np.sqrt(noise.variance)
    if isinstance(noise, WhiteNoise):
        values = rng.normal(0.0, sd, size=n)
    elif isinstance(noise, MA1):
        eps = rng.normal(0.0, sd, size=n + 1)
        values = eps[1:] + noise.theta * eps[:-1]
    elif isinstance(noise, AR1):
        x1 = rng.normal(0.0, sd / np.sqrt(1.0 - noise.a**2))
        eps = rng.normal(0.0, sd, size=n - 1)
        drive = np.concatenate(([x1], eps))
        values = lfilter([1.0], [1.0, -noise.a], drive)
    else:
        raise TypeError(f"unsupported noise family: {noise!r}")

    if model.atoms:
        t = np.arange(1, n + 1, dtype=float)
        for atom, phi in zip(model.atoms, phases):
            values = values + atom.amplitude * np.cos(atom.frequency * t + phi)

    return TimeSeries(values=values, seed=seed, model_tag=describe(model))


def generate_batch(plan: SimulationPlan, threads: int = 1) -> list[TimeSeries]:
    """Independent replicate series; replicate k uses derive_seed(base_seed, k)."""
    seeds = [derive_seed(plan.base_seed, k) for k in range(plan.replications)]
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda s: generate(plan.model, plan.n, s), seeds))
    return [generate(plan.model, plan.n, s) for s in seeds]


# --- CSV import/export -------------------------------------------------------


def save_series(series: TimeSeries, path) -> None:
    """Write a single-column CSV with header ``value``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["value"])
        for v in series.values:
            writer.writerow([repr(float(v))])


def load_series(path) -> TimeSeries:
    """Read a single-column CSV written by :func:`save_series`.

    Raises ValueError with the offending row number on malformed input.
    """
    path = Path(path)
    values = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or not header or header[0].strip() != "value":
            raise ValueError(f"{path}: row 1: expected header 'value', got {header!r}")
        for i, row in enumerate(reader, start=2):
            if not row or not row[0].strip():
                continue
            try:
                values.append(float(row[0]))
            except ValueError as exc:
                raise ValueError(f"{path}: row {i}: could not parse {row[0]!r}") from exc
    if len(values) < 2:
        raise ValueError(f"{path}: series must contain at least 2 values")
    return TimeSeries(values=np.array(values), seed=0, model_tag=f"csv:{path.name}")


def save_batch(batch: list[TimeSeries], directory, stem: str = "series") -> list[Path]:
    """One CSV per replicate: ``<stem>_0000.csv``, ``<stem>_0001.csv``, ..."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for k, series in enumerate(batch):
        path = directory / f"{stem}_{k:04d}.csv"
        save_series(series, path)
        paths.append(path)
    return paths
