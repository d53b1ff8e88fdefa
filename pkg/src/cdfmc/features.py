"""Empirical CDF of mean-normalized amplitudes, and reference CDFs.

Reference CDFs come from two independent routes: Monte Carlo emulation of
noisy symbols (what a receiver would do at a known OSNR) and the exact
Rician-mixture law evaluated through the Marcum Q function.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from cdfmc.channel import SampleBlock, noise_variance_from_snr
from cdfmc.constellation import (
    DEFAULT_QAM8_GEOMETRY,
    ModulationFormat,
    amplitude_levels,
    constellation_points,
)
from cdfmc.marcum import rice_cdf, rice_mean

log = logging.getLogger(__name__)

DEFAULT_GRID_COUNT = 1000
DEFAULT_GRID_MAX = 2.5


class DegenerateInputError(ValueError):
    """Input has no usable amplitude information (e.g. all-zero samples)."""


@dataclass(frozen=True)
class AmplitudeGrid:
    """Uniform grid ``max * k / count`` for ``k = 1..count``."""

    count: int = DEFAULT_GRID_COUNT
    max: float = DEFAULT_GRID_MAX

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError(f"grid count must be positive, got {self.count}")
        if not self.max > 0:
            raise ValueError(f"grid max must be positive, got {self.max}")

    @cached_property
    def points(self) -> np.ndarray:
        z = self.max * np.arange(1, self.count + 1) / self.count
        z.setflags(write=False)
        return z

    @property
    def step(self) -> float:
        return self.max / self.count


@dataclass(frozen=True, eq=False)
class EmpiricalCdf:
    grid: AmplitudeGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.count,):
            raise ValueError(f"expected {self.grid.count} CDF values, got shape {v.shape}")
        if np.any(~np.isfinite(v)) or v.min() < -1e-12 or v.max() > 1 + 1e-12:
            raise ValueError("CDF values must lie in [0, 1]")
        if np.any(np.diff(v) < -1e-12):
            raise ValueError("CDF values must be nondecreasing")
        v = np.maximum.accumulate(np.clip(v, 0.0, 1.0))
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __call__(self, z) -> np.ndarray:
        """Piecewise-linear evaluation between grid points, 0 at z = 0."""
        zs = np.concatenate(([0.0], self.grid.points))
        fs = np.concatenate(([0.0], self.values))
        return np.interp(z, zs, fs, right=1.0)

    def to_csv(self) -> str:
        lines = ["z,F"]
        lines += [f"{z:.17g},{f:.17g}" for z, f in zip(self.grid.points, self.values)]
        return "\n".join(lines) + "\n"


def normalized_amplitudes(block: SampleBlock | np.ndarray) -> np.ndarray:
    """``|y_k|`` divided by the block's mean modulus."""
    samples = block.samples if isinstance(block, SampleBlock) else np.asarray(block)
    if samples.size == 0:
        raise DegenerateInputError("empty sample block")
    amp = np.abs(samples)
    mean = amp.mean()
    if not mean > 0 or not math.isfinite(mean):
        raise DegenerateInputError("mean amplitude is zero or non-finite; cannot normalize")
    return amp / mean


def empirical_cdf(amplitudes, grid: AmplitudeGrid | None = None) -> EmpiricalCdf:
    """Fraction of amplitudes ``<= z`` at each grid point.

    Amplitudes above ``grid.max`` still count toward the sample size.
    """
    grid = grid or AmplitudeGrid()
    a = np.sort(np.asarray(amplitudes, dtype=float).ravel())
    if a.size == 0:
        raise DegenerateInputError("no amplitudes")
    clipped = a.size - int(np.searchsorted(a, grid.max, side="right"))
    if clipped:
        log.warning("%d of %d amplitudes exceed grid max %g", clipped, a.size, grid.max)
    counts = np.searchsorted(a, grid.points, side="right")
    return EmpiricalCdf(grid=grid, values=counts / a.size)


def _simulate_amplitudes(
    fmt: ModulationFormat, sigma_sq: float, n: int, rng: np.random.Generator,
    qam8_geometry: str, chunk: int = 1 << 20,
) -> np.ndarray:
    points = constellation_points(fmt, qam8_geometry).points
    scale = math.sqrt(sigma_sq / 2.0)
    out = np.empty(n)
    for start in range(0, n, chunk):
        m = min(chunk, n - start)
        x = points[rng.integers(0, len(points), size=m)]
        if scale > 0:
            noise = rng.standard_normal((m, 2))
            x = x + scale * (noise[:, 0] + 1j * noise[:, 1])
        out[start:start + m] = np.abs(x)
    return out


def reference_cdf_mc(
    fmt: ModulationFormat,
    snr_db: float,
    n_ref: int = 100_000,
    seed: int = 0,
    grid: AmplitudeGrid | None = None,
    qam8_geometry: str = DEFAULT_QAM8_GEOMETRY,
) -> EmpiricalCdf:
    """Reference CDF emulated from ``n_ref`` noisy symbols (no carrier rotation)."""
    if n_ref < 1:
        raise ValueError(f"n_ref must be >= 1, got {n_ref}")
    rng = np.random.default_rng(seed)
    amp = _simulate_amplitudes(fmt, noise_variance_from_snr(snr_db), n_ref, rng, qam8_geometry)
    return empirical_cdf(normalized_amplitudes(amp), grid)


def mixture_mean_amplitude(
    fmt: ModulationFormat, snr_db: float, qam8_geometry: str = DEFAULT_QAM8_GEOMETRY
) -> float:
    s = math.sqrt(noise_variance_from_snr(snr_db) / 2.0)
    levels = amplitude_levels(constellation_points(fmt, qam8_geometry))
    total = sum(m for _, m in levels)
    return sum(m * rice_mean(nu, s) for nu, m in levels) / total


def reference_cdf_analytic(
    fmt: ModulationFormat,
    snr_db: float,
    grid: AmplitudeGrid | None = None,
    qam8_geometry: str = DEFAULT_QAM8_GEOMETRY,
) -> EmpiricalCdf:
    """Exact CDF of the mean-normalized amplitude under AWGN.

    Each amplitude level of radius nu contributes a Rician(nu, s) component,
    s^2 = sigma^2 / 2, weighted by its multiplicity.  ``snr_db = inf`` gives
    the noiseless staircase.
    """
    if math.isnan(snr_db) or snr_db == -math.inf:
        raise ValueError(f"snr_db must be finite or +inf, got {snr_db}")
    grid = grid or AmplitudeGrid()
    s = math.sqrt(noise_variance_from_snr(snr_db) / 2.0)
    levels = amplitude_levels(constellation_points(fmt, qam8_geometry))
    total = sum(m for _, m in levels)
    z = grid.points * mixture_mean_amplitude(fmt, snr_db, qam8_geometry)
    values = np.zeros(grid.count)
    for nu, m in levels:
        values += m / total * rice_cdf(z, nu, s)
    return EmpiricalCdf(grid=grid, values=values)
