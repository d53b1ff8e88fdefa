"""Received-sample synthesis at a target OSNR, plus sample-file I/O.

One sample per symbol, single polarization.  The noise is circular complex
Gaussian with total variance sigma^2 (sigma^2 / 2 per quadrature); with unit
power constellations SNR = 1 / sigma^2.  Carrier rotation is a linear phase
ramp from the frequency offset plus a Wiener phase walk whose per-symbol
increment variance is 2 pi linewidth / symbol_rate.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from cdfmc.constellation import (
    DEFAULT_QAM8_GEOMETRY,
    ModulationFormat,
    constellation_points,
)

REF_BANDWIDTH_HZ = 12.5e9  # 0.1 nm at 1550 nm


class SampleFormatError(ValueError):
    """A sample file could not be parsed."""


def osnr_to_snr(
    osnr_db: float, symbol_rate_baud: float, ref_bandwidth_hz: float = REF_BANDWIDTH_HZ
) -> float:
    if symbol_rate_baud <= 0 or ref_bandwidth_hz <= 0:
        raise ValueError("symbol rate and reference bandwidth must be positive")
    return osnr_db - 10.0 * math.log10(symbol_rate_baud / ref_bandwidth_hz)


def noise_variance_from_snr(snr_db: float) -> float:
    """Total complex noise variance for a unit-power signal."""
    return 10.0 ** (-snr_db / 10.0)


@dataclass(frozen=True)
class ChannelConfig:
    osnr_db: float
    symbol_rate_baud: float
    ref_bandwidth_hz: float = REF_BANDWIDTH_HZ
    freq_offset_hz: float = 0.0
    linewidth_hz: float = 0.0
    amplitude_scale: float = 1.0
    seed: int = 0
    qam8_geometry: str = DEFAULT_QAM8_GEOMETRY

    def __post_init__(self) -> None:
        if not self.symbol_rate_baud > 0:
            raise ValueError(f"symbol_rate_baud must be positive, got {self.symbol_rate_baud}")
        if not self.ref_bandwidth_hz > 0:
            raise ValueError(f"ref_bandwidth_hz must be positive, got {self.ref_bandwidth_hz}")
        if not self.amplitude_scale > 0:
            raise ValueError(f"amplitude_scale must be positive, got {self.amplitude_scale}")
        if self.linewidth_hz < 0:
            raise ValueError(f"linewidth_hz must be nonnegative, got {self.linewidth_hz}")

    @property
    def snr_db(self) -> float:
        return osnr_to_snr(self.osnr_db, self.symbol_rate_baud, self.ref_bandwidth_hz)

    @property
    def noise_variance(self) -> float:
        return noise_variance_from_snr(self.snr_db)


@dataclass(frozen=True, eq=False)
class SampleBlock:
    samples: np.ndarray
    config: ChannelConfig | None = None
    format: ModulationFormat | None = None
    source: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=complex)
        if samples.ndim != 1 or samples.size < 1:
            raise ValueError("a sample block needs at least one complex sample")
        object.__setattr__(self, "samples", samples)

    @property
    def count(self) -> int:
        return self.samples.size

    def __len__(self) -> int:
        return self.samples.size


def simulate_block(
    fmt: ModulationFormat, k_samples: int, config: ChannelConfig
) -> SampleBlock:
    """Draw ``k_samples`` received symbols of ``fmt`` through the configured channel."""
    if k_samples < 1:
        raise ValueError(f"k_samples must be >= 1, got {k_samples}")
    rng = np.random.default_rng(config.seed)
    points = constellation_points(fmt, config.qam8_geometry).points
    y = points[rng.integers(0, len(points), size=k_samples)]

    sigma_sq = config.noise_variance
    if sigma_sq > 0:
        quad = rng.normal(0.0, math.sqrt(sigma_sq / 2.0), size=(k_samples, 2))
        y = y + (quad[:, 0] + 1j * quad[:, 1])

    if config.freq_offset_hz != 0 or config.linewidth_hz > 0:
        k = np.arange(k_samples)
        phase = 2.0 * np.pi * config.freq_offset_hz * k / config.symbol_rate_baud
        if config.linewidth_hz > 0:
            step = math.sqrt(2.0 * np.pi * config.linewidth_hz / config.symbol_rate_baud)
            phase = phase + np.cumsum(rng.normal(0.0, step, size=k_samples))
        y = y * np.exp(1j * phase)

    if config.amplitude_scale != 1.0:
        y = config.amplitude_scale * y
    return SampleBlock(samples=y, config=config, format=fmt)


# --- sample files -----------------------------------------------------------

def write_samples(path: str | os.PathLike, samples) -> None:
    """Write complex samples as ``.csv`` (header ``i,q``) or ``.iq`` (LE float64 pairs)."""
    path = Path(path)
    samples = np.asarray(samples, dtype=complex).ravel()
    suffix = path.suffix.lower()
    if suffix == ".csv":
        with open(path, "w", newline="") as fh:
            fh.write("i,q\n")
            for s in samples:
                fh.write(f"{s.real:.17g},{s.imag:.17g}\n")
    elif suffix == ".iq":
        pairs = np.empty(2 * samples.size, dtype="<f8")
        pairs[0::2] = samples.real
        pairs[1::2] = samples.imag
        path.write_bytes(pairs.tobytes())
    else:
        raise ValueError(f"unsupported sample file extension {suffix!r} (use .csv or .iq)")


def read_samples(path: str | os.PathLike) -> SampleBlock:
    path = Path(path)
    suffix = path.suffix.lower()
    try:
        if suffix == ".csv":
            samples = _read_csv(path)
        elif suffix == ".iq":
            samples = _read_iq(path)
        else:
            raise SampleFormatError(
                f"{path}: unsupported extension {suffix!r} (use .csv or .iq)"
            )
    except OSError as exc:
        raise SampleFormatError(f"{path}: cannot read file: {exc}") from exc
    return SampleBlock(samples=samples, source=str(path))


def _read_csv(path: Path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = csv.reader(fh)
        header = next(rows, None)
        if header is None:
            raise SampleFormatError(f"{path}: empty file")
        if [h.strip().lower() for h in header] != ["i", "q"]:
            raise SampleFormatError(f"{path}:1: expected header 'i,q', got {','.join(header)!r}")
        values = []
        for lineno, row in enumerate(rows, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise SampleFormatError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            try:
                i, q = float(row[0]), float(row[1])
            except ValueError:
                raise SampleFormatError(
                    f"{path}:{lineno}: not a number: {','.join(row)!r}"
                ) from None
            if not (math.isfinite(i) and math.isfinite(q)):
                raise SampleFormatError(f"{path}:{lineno}: non-finite sample")
            values.append(complex(i, q))
    if not values:
        raise SampleFormatError(f"{path}: no samples after header")
    return np.array(values, dtype=complex)


def _read_iq(path: Path) -> np.ndarray:
    raw = path.read_bytes()
    if not raw:
        raise SampleFormatError(f"{path}: empty file")
    if len(raw) % 16:
        raise SampleFormatError(
            f"{path}: size {len(raw)} bytes is not a multiple of 16; "
            f"truncated sample at byte offset {len(raw) - len(raw) % 16}"
        )
    pairs = np.frombuffer(raw, dtype="<f8")
    bad = np.flatnonzero(~np.isfinite(pairs))
    if bad.size:
        raise SampleFormatError(f"{path}: non-finite value at byte offset {8 * int(bad[0])}")
    return pairs[0::2] + 1j * pairs[1::2]
