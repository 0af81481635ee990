"""Parametric spectral models and their distribution-function oracles.

Supported noise families are Gaussian white noise, MA(1) and AR(1); a model
may additionally carry fixed-amplitude, random-phase sinusoid components.
Every model induces a spectral measure on [-pi, pi] -- a continuous density
plus symmetric point masses -- whose CDF and quantiles are computed here in
closed form (with adaptive quadrature as the generic fallback).  These exact
values serve as ground truth for the estimators and tests elsewhere in the
package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy import integrate

TWO_PI = 2.0 * np.pi

#: Absolute tolerance for quadrature and for quantile bisection.
QUAD_TOL = 1e-10
BISECT_TOL = 1e-10


@dataclass(frozen=True)
class WhiteNoise:
    """Independent Gaussian noise with the given innovation variance."""

    variance: float = 1.0

    def __post_init__(self):
        if self.variance <= 0:
            raise ValueError(f"variance must be > 0, got {self.variance}")


@dataclass(frozen=True)
class MA1:
    """First-order moving average X_t = e_t + theta * e_(t-1)."""

    theta: float
    variance: float = 1.0

    def __post_init__(self):
        if self.variance <= 0:
            raise ValueError(f"variance must be > 0, got {self.variance}")


@dataclass(frozen=True)
class AR1:
    """First-order autoregression X_t = a * X_(t-1) + e_t with |a| < 1."""

    a: float
    variance: float = 1.0

    def __post_init__(self):
        if not abs(self.a) < 1:
            raise ValueError(f"AR(1) coefficient must satisfy |a| < 1, got {self.a}")
        if self.variance <= 0:
            raise ValueError(f"variance must be > 0, got {self.variance}")


Noise = Union[WhiteNoise, MA1, AR1]


@dataclass(frozen=True)
class SinusoidAtom:
    """One harmonic component: amplitude * cos(frequency * t + phase).

    The frequency must lie strictly inside (0, pi); components at 0 or pi are
    not identifiable from the spectral distribution and are rejected.
    """

    amplitude: float
    frequency: float

    def __post_init__(self):
        if self.amplitude <= 0:
            raise ValueError(f"amplitude must be > 0, got {self.amplitude}")
        if not 0.0 < self.frequency < np.pi:
            raise ValueError(
                f"frequency must be strictly inside (0, pi), got {self.frequency}"
            )


@dataclass(frozen=True)
class SpectralModel:
    """A noise family plus zero or more sinusoid components."""

    noise: Noise
    atoms: tuple[SinusoidAtom, ...] = ()

    def __post_init__(self):
        if not isinstance(self.noise, (WhiteNoise, MA1, AR1)):
            raise TypeError(f"unsupported noise family: {self.noise!r}")
        object.__setattr__(self, "atoms", tuple(self.atoms))


@dataclass
class SpectralMeasure:
    """Continuous spectral density plus symmetric point masses on [-pi, pi].

    ``density`` maps frequencies to nonnegative values, ``atoms`` is a sorted
    tuple of (location, mass) pairs, and ``total_mass`` equals the process
    variance (integral of the density plus the sum of the masses).  When
    ``cum_density`` is provided it is the closed-form antiderivative of the
    continuous part, anchored at cum_density(-pi) = 0; otherwise CDF values
    fall back to adaptive quadrature.
    """

    density: Callable[[np.ndarray], np.ndarray]
    atoms: tuple[tuple[float, float], ...]
    total_mass: float
    cum_density: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if self.total_mass <= 0:
            raise ValueError("total_mass must be > 0")
        self.atoms = tuple(sorted(self.atoms))


def _check_domain(omega) -> np.ndarray:
    w = np.asarray(omega, dtype=float)
    if np.any(np.abs(w) > np.pi + 1e-12):
        raise ValueError(f"frequency outside [-pi, pi]: {omega!r}")
    return w


def noise_variance(noise: Noise) -> float:
    """Lag-zero autocovariance of the noise family."""
    if isinstance(noise, WhiteNoise):
        return noise.variance
    if isinstance(noise, MA1):
        return noise.variance * (1.0 + noise.theta**2)
    return noise.variance / (1.0 - noise.a**2)


def spectral_density(model: SpectralModel, omega) -> np.ndarray:
    """Spectral density of the continuous (noise) part of ``model``.

    White noise: v / 2pi.  MA(1): (v/2pi)(1 + theta^2 + 2 theta cos w).
    AR(1): (v/2pi) / (1 - 2 a cos w + a^2).  Sinusoid components contribute
    point masses only and are excluded here.
    """
    w = _check_domain(omega)
    noise = model.noise
    if isinstance(noise, WhiteNoise):
        out = np.full_like(w, noise.variance / TWO_PI)
    elif isinstance(noise, MA1):
        th = noise.theta
        out = (noise.variance / TWO_PI) * (1.0 + th**2 + 2.0 * th * np.cos(w))
    else:
        a = noise.a
        out = (noise.variance / TWO_PI) / (1.0 - 2.0 * a * np.cos(w) + a**2)
    return out if out.ndim else float(out)


def _cum_density_fn(noise: Noise) -> Callable[[np.ndarray], np.ndarray]:
    # Closed-form integral of the density from -pi to omega.
    if isinstance(noise, WhiteNoise):
        v = noise.variance

        def cum(w):
            return v * (np.asarray(w, dtype=float) + np.pi) / TWO_PI

    elif isinstance(noise, MA1):
        v, th = noise.variance, noise.theta

        def cum(w):
            w = np.asarray(w, dtype=float)
            return (v / TWO_PI) * ((1.0 + th**2) * (w + np.pi) + 2.0 * th * np.sin(w))

    else:
        v, a = noise.variance, noise.a
        k = (1.0 + a) / (1.0 - a)
        scale = (v / TWO_PI) * 2.0 / (1.0 - a**2)

        def cum(w):
            w = np.asarray(w, dtype=float)
            # arctan(k tan(w/2)) is the antiderivative branch valid on (-pi, pi);
            # tan is finite there and the endpoint limits are +-pi/2.
            half = np.where(np.abs(w) >= np.pi, np.sign(w) * (np.pi / 2.0), np.arctan(k * np.tan(w / 2.0)))
            return scale * (half + np.pi / 2.0)

    return cum


def spectral_measure(model: SpectralModel) -> SpectralMeasure:
    """Spectral measure of ``model``: noise density plus sinusoid masses.

    Each sinusoid of amplitude R at frequency lam contributes mass R^2/4 at
    +-lam, so the induced autocovariance is (R^2/2) cos(lam h) and the total
    mass equals the process variance.
    """
    atoms = []
    for atom in model.atoms:
        mass = atom.amplitude**2 / 4.0
        atoms.append((-atom.frequency, mass))
        atoms.append((atom.frequency, mass))
    total = noise_variance(model.noise) + sum(m for _, m in atoms)

    def density(w):
        return spectral_density(model, w)

    return SpectralMeasure(
        density=density,
        atoms=tuple(sorted(atoms)),
        total_mass=total,
        cum_density=_cum_density_fn(model.noise),
    )


def spectral_cdf(measure: SpectralMeasure, omega) -> float | np.ndarray:
    """Right-continuous CDF of ``measure`` at ``omega``.

    Uses the closed-form antiderivative when the measure carries one,
    otherwise adaptive quadrature of the density to absolute tolerance 1e-10.
    Point masses at locations <= omega are included.
    """
    w = _check_domain(omega)
    if measure.cum_density is not None:
        cont = measure.cum_density(w)
    elif w.ndim == 0:
        cont, _ = integrate.quad(
            measure.density, -np.pi, float(w), epsabs=QUAD_TOL, limit=200
        )
    else:
        cont = np.array(
            [
                integrate.quad(measure.density, -np.pi, wi, epsabs=QUAD_TOL, limit=200)[0]
                for wi in w.ravel()
            ]
        ).reshape(w.shape)
    out = np.asarray(cont, dtype=float).copy()
    for loc, mass in measure.atoms:
        out = out + mass * (w >= loc)
    return out if out.ndim else float(out)


def true_quantile(measure: SpectralMeasure, p: float) -> float:
    """Smallest omega whose normalized CDF reaches ``p``.

    Jumps are handled exactly: when a point mass straddles the target level
    the atom location itself is returned.  Elsewhere the crossing is located
    by bisection to 1e-10 radians.  p = 0 maps to -pi.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p == 0.0:
        return -np.pi
    total = measure.total_mass
    target = p * total

    lo, hi = -np.pi, np.pi
    for loc, mass in measure.atoms:
        f_right = spectral_cdf(measure, loc)
        if f_right >= target:
            if f_right - mass < target:
                return loc
            hi = min(hi, loc)
        else:
            lo = max(lo, loc)

    if p == 1.0:
        # Guard against the closed-form CDF at pi rounding a hair below the
        # total mass; any strictly positive density makes this exact anyway.
        target = total * (1.0 - 1e-12)
    while hi - lo > BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if spectral_cdf(measure, mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


def population_objective(measure: SpectralMeasure, p: float, theta: float) -> float:
    """Expected check-function loss of center ``theta`` under ``measure``.

    Integrates rho_p(omega - theta) against the measure; its minimizer over
    theta is the p-th quantile, which the property tests verify.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    theta = float(_check_domain(theta))
    dens = measure.density
    left, _ = integrate.quad(
        lambda w: (theta - w) * dens(w), -np.pi, theta, epsabs=QUAD_TOL, limit=200
    )
    right, _ = integrate.quad(
        lambda w: (w - theta) * dens(w), theta, np.pi, epsabs=QUAD_TOL, limit=200
    )
    value = (1.0 - p) * left + p * right
    for loc, mass in measure.atoms:
        u = loc - theta
        value += mass * u * (p - (u < 0.0))
    return value


# --- serialization -----------------------------------------------------------

_FAMILIES = {"white_noise": WhiteNoise, "ma1": MA1, "ar1": AR1}


def model_to_dict(model: SpectralModel) -> dict:
    """Structured-config form: {noise: {family, coeff, variance}, atoms: [...]}."""
    noise = model.noise
    if isinstance(noise, WhiteNoise):
        rec = {"family": "white_noise", "variance": noise.variance}
    elif isinstance(noise, MA1):
        rec = {"family": "ma1", "coeff": noise.theta, "variance": noise.variance}
    else:
        rec = {"family": "ar1", "coeff": noise.a, "variance": noise.variance}
    return {
        "noise": rec,
        "atoms": [
            {"amplitude": a.amplitude, "frequency": a.frequency} for a in model.atoms
        ],
    }


def model_from_dict(spec: dict) -> SpectralModel:
    """Inverse of :func:`model_to_dict`; raises ValueError on malformed input."""
    try:
        noise_rec = dict(spec["noise"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"model record must contain a 'noise' mapping: {spec!r}") from exc
    family = noise_rec.get("family")
    if family not in _FAMILIES:
        raise ValueError(f"unknown noise family {family!r} (expected one of {sorted(_FAMILIES)})")
    variance = float(noise_rec.get("variance", 1.0))
    if family == "white_noise":
        noise = WhiteNoise(variance)
    elif family == "ma1":
        noise = MA1(float(noise_rec["coeff"]), variance)
    else:
        noise = AR1(float(noise_rec["coeff"]), variance)
    atoms = tuple(
        SinusoidAtom(float(a["amplitude"]), float(a["frequency"]))
        for a in spec.get("atoms", ())
    )
    return SpectralModel(noise, atoms)


def describe(model: SpectralModel) -> str:
    """Compact human-readable tag, e.g. ``ar1(a=0.9,v=1)+atom(0.5@1.571)``."""
    noise = model.noise
    if isinstance(noise, WhiteNoise):
        tag = f"white_noise(v={noise.variance:g})"
    elif isinstance(noise, MA1):
        tag = f"ma1(theta={noise.theta:g},v={noise.variance:g})"
    else:
        tag = f"ar1(a={noise.a:g},v={noise.variance:g})"
    for atom in model.atoms:
        tag += f"+atom({atom.amplitude:g}@{atom.frequency:.4g})"
    return tag
