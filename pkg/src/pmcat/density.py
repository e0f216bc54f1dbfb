"""One-dimensional density states, Gaussian-mean channels and quadrature.

The continuous counterpart of the finite machinery, at desk scale: priors
given by uniform, normal or gridded densities, a channel sending a location
to a normal distribution around it, and posteriors after observing an exact
value.  The evidence integral is computed by composite Simpson quadrature;
an error-function closed form for the truncated-normal posterior serves as
an independent oracle.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

NORMAL_TAIL_SIGMAS = 8.0  # mass beyond is < 1.3e-15 and is ignored


class DensityError(Exception):
    """Numeric failure in the density pipeline."""


class ZeroEvidenceError(DensityError):
    """The observation has (numerically) zero marginal density: the posterior
    would be a measure-zero subdistribution, which cannot be renormalised."""


def _phi(z: np.ndarray | float) -> np.ndarray | float:
    return np.exp(-0.5 * np.square(z)) / math.sqrt(2.0 * math.pi)


def _Phi(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


@dataclass(frozen=True)
class Uniform:
    """The indicator density of an interval, normalised."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise DensityError(f"degenerate interval [{self.lo}, {self.hi}]")

    @property
    def support(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    def pdf(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        inside = (x >= self.lo) & (x <= self.hi)
        return np.where(inside, 1.0 / (self.hi - self.lo), 0.0)


@dataclass(frozen=True)
class Normal:
    """A normal density; integration truncates at +/- 8 sigma."""

    mu: float
    sigma: float

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise DensityError("sigma must be positive")

    @property
    def support(self) -> tuple[float, float]:
        return (self.mu - NORMAL_TAIL_SIGMAS * self.sigma,
                self.mu + NORMAL_TAIL_SIGMAS * self.sigma)

    def pdf(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return _phi((x - self.mu) / self.sigma) / self.sigma


@dataclass(frozen=True)
class GridDensity:
    """A density tabulated on a uniform grid; linear interpolation between
    points, zero outside."""

    xs: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        xs = np.asarray(self.xs, dtype=float)
        vs = np.asarray(self.values, dtype=float)
        if xs.ndim != 1 or xs.shape != vs.shape or xs.size < 2:
            raise DensityError("grid needs matching 1-D arrays of length >= 2")
        if np.any(np.diff(xs) <= 0):
            raise DensityError("grid points must be strictly increasing")
        if np.any(vs < 0) or not np.all(np.isfinite(vs)):
            raise DensityError("grid density values must be finite and nonnegative")
        xs.flags.writeable = False
        vs.flags.writeable = False
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "values", vs)

    @property
    def support(self) -> tuple[float, float]:
        return (float(self.xs[0]), float(self.xs[-1]))

    def pdf(self, x: np.ndarray) -> np.ndarray:
        return np.interp(np.asarray(x, dtype=float), self.xs, self.values,
                         left=0.0, right=0.0)

    def integral(self) -> float:
        step = float(self.xs[1] - self.xs[0])
        if self.xs.size % 2 == 1:
            return simpson(self.values, step)
        # even point counts fall back to the trapezoid rule
        inner = float(self.values[1:-1].sum())
        return step * (inner + 0.5 * float(self.values[0] + self.values[-1]))


DensityState = Uniform | Normal | GridDensity


@dataclass(frozen=True)
class NormalMeanChannel:
    """The channel x |-> Normal(x, sigma): pdf(y | x) = phi((y - x)/sigma)/sigma."""

    sigma: float = 1.0

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise DensityError("sigma must be positive")

    def pdf(self, y: float, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return _phi((y - x) / self.sigma) / self.sigma


DensityChannel = NormalMeanChannel


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Simpson rule on an odd number of equally spaced points."""

    n: int = 2001
    quad_tol: float = 1e-8

    def __post_init__(self) -> None:
        if self.n < 3 or self.n % 2 == 0:
            raise DensityError("quadrature needs an odd point count >= 3")
        if self.quad_tol <= 0:
            raise DensityError("quad_tol must be positive")


DEFAULT_QUAD = QuadratureSpec()


def simpson(values: np.ndarray, step: float) -> float:
    """Composite Simpson quadrature of tabulated values with spacing ``step``."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < 3 or n % 2 == 0:
        raise DensityError("composite Simpson needs an odd number of points >= 3")
    coeff = np.ones(n)
    coeff[1:-1:2] = 4.0
    coeff[2:-1:2] = 2.0
    return float(coeff @ values) * step / 3.0


def support_grid(prior: DensityState, n: int) -> np.ndarray:
    lo, hi = prior.support
    return np.linspace(lo, hi, n)


def evidence_density(
    prior: DensityState,
    channel: DensityChannel,
    v: float,
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> float:
    """Marginal density of observing ``v`` under prior ; channel.

    Integrates channel.pdf(v | x) * prior.pdf(x) over the prior support.
    """
    xs = support_grid(prior, quad.n)
    integrand = channel.pdf(v, xs) * prior.pdf(xs)
    if not np.all(np.isfinite(integrand)):
        raise DensityError(f"non-finite integrand for observation {v}")
    return simpson(integrand, float(xs[1] - xs[0]))


def posterior_exact(
    prior: DensityState,
    channel: DensityChannel,
    v: float,
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> GridDensity:
    """Posterior density over the prior support after exactly observing ``v``.

    pointwise prior.pdf(m) * channel.pdf(v | m) / evidence; raises
    :class:`ZeroEvidenceError` when the evidence mass is numerically zero.
    """
    evidence = evidence_density(prior, channel, v, quad)
    if evidence <= quad.quad_tol:
        raise ZeroEvidenceError(
            f"evidence density {evidence} for observation {v} is not renormalisable"
        )
    xs = support_grid(prior, quad.n)
    values = prior.pdf(xs) * channel.pdf(v, xs) / evidence
    return GridDensity(xs, values)


def truncated_normal_oracle(
    a: float, b: float, sigma: float, v: float
) -> Callable[[np.ndarray], np.ndarray]:
    """Closed-form truncated-normal pdf on [a, b], centred at the observation.

    pdf(m) = phi((m - v)/sigma) / (sigma * (Phi((b - v)/sigma) - Phi((a - v)/sigma)))
    inside the interval and 0 outside.  Independent of the quadrature path:
    the normalising constant comes from the error function.
    """
    if not a < b:
        raise DensityError(f"degenerate interval [{a}, {b}]")
    if sigma <= 0:
        raise DensityError("sigma must be positive")
    mass = _Phi((b - v) / sigma) - _Phi((a - v) / sigma)
    if mass <= 0.0:
        raise ZeroEvidenceError(f"zero truncated mass on [{a}, {b}] at {v}")

    def pdf(m: np.ndarray) -> np.ndarray:
        m = np.asarray(m, dtype=float)
        inside = (m >= a) & (m <= b)
        return np.where(inside, _phi((m - v) / sigma) / (sigma * mass), 0.0)

    return pdf


def posterior_table(
    prior: DensityState,
    channel: DensityChannel,
    vs: Sequence[float],
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> tuple[np.ndarray, dict[float, np.ndarray]]:
    """Grid points and one posterior pdf column per observed value."""
    xs = support_grid(prior, quad.n)
    columns = {float(v): posterior_exact(prior, channel, v, quad).values for v in vs}
    return xs, columns


def emit_posterior_csv(
    prior: DensityState,
    channel: DensityChannel,
    vs: Sequence[float],
    quad: QuadratureSpec,
    path: str,
) -> tuple[np.ndarray, dict[float, np.ndarray]]:
    """Write posterior curves as CSV: header ``m,pdf_v<value>...``, one row per
    grid point, 15 significant digits.  Returns the emitted table."""
    xs, columns = posterior_table(prior, channel, vs, quad)
    try:
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["m"] + [f"pdf_v{v:g}" for v in columns])
            for i, m in enumerate(xs):
                writer.writerow([f"{m:.15g}"] + [f"{col[i]:.15g}" for col in columns.values()])
    except OSError as err:
        raise DensityError(f"cannot write {path}: {err}") from err
    return xs, columns
