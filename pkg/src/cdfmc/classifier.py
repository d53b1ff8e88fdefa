"""Minimum average CDF distance decision over a bank of candidate references."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np

from cdfmc.channel import REF_BANDWIDTH_HZ, SampleBlock, osnr_to_snr
from cdfmc.constellation import DEFAULT_QAM8_GEOMETRY, ModulationFormat
from cdfmc.features import (
    AmplitudeGrid,
    EmpiricalCdf,
    empirical_cdf,
    normalized_amplitudes,
    reference_cdf_analytic,
    reference_cdf_mc,
)

BankMethod = Literal["analytic", "monte_carlo"]
DistanceMode = Literal["grid", "samples"]
DEFAULT_N_REF = 100_000


@dataclass(frozen=True, eq=False)
class ReferenceBank:
    osnr_db: float
    symbol_rate_baud: float
    entries: dict[ModulationFormat, EmpiricalCdf]
    method: BankMethod = "analytic"
    n_ref: int | None = None
    seed: int | None = None
    qam8_geometry: str = DEFAULT_QAM8_GEOMETRY

    def __post_init__(self) -> None:
        missing = set(ModulationFormat) - set(self.entries)
        if missing:
            raise ValueError(f"reference bank lacks {sorted(f.name for f in missing)}")
        grids = {cdf.grid for cdf in self.entries.values()}
        if len(grids) != 1:
            raise ValueError("all reference CDFs must share one grid")

    @property
    def grid(self) -> AmplitudeGrid:
        return next(iter(self.entries.values())).grid

    @property
    def formats(self) -> list[ModulationFormat]:
        return sorted(self.entries, key=lambda f: f.index)

    @property
    def snr_db(self) -> float:
        return osnr_to_snr(self.osnr_db, self.symbol_rate_baud)


@dataclass(frozen=True)
class ClassificationResult:
    decision: ModulationFormat
    distances: dict[ModulationFormat, float]
    margin: float
    k_samples: int = 0
    clipped: int = field(default=0, compare=False)

    def to_dict(self, config: dict | None = None) -> dict:
        out = {
            "decision": self.decision.name,
            "distances": {f.name: mu for f, mu in self.distances.items()},
            "margin": self.margin,
            "k_samples": self.k_samples,
            "clipped": self.clipped,
        }
        if config is not None:
            out["config"] = config
        return out

    def to_json(self, config: dict | None = None) -> str:
        return json.dumps(self.to_dict(config), indent=2)


def cdf_distance(received: EmpiricalCdf, reference: EmpiricalCdf) -> float:
    """Mean absolute difference of two CDFs over their shared grid."""
    if received.grid != reference.grid:
        raise ValueError("CDFs are sampled on different grids")
    return float(np.mean(np.abs(reference.values - received.values)))


def _sample_point_distances(amplitudes: np.ndarray, bank: ReferenceBank) -> list[float]:
    # evaluate both CDFs at the K observed amplitudes instead of the grid
    a = np.sort(amplitudes)
    f0 = np.searchsorted(a, a, side="right") / a.size
    return [float(np.mean(np.abs(bank.entries[f](a) - f0))) for f in bank.formats]


def classify(
    block: SampleBlock, bank: ReferenceBank, mode: DistanceMode = "grid"
) -> ClassificationResult:
    """Pick the candidate whose reference CDF is closest on average.

    Exact ties go to the lower-order format.
    """
    amp = normalized_amplitudes(block)
    formats = bank.formats
    if mode == "grid":
        received = empirical_cdf(amp, bank.grid)
        mus = [cdf_distance(received, bank.entries[f]) for f in formats]
    elif mode == "samples":
        mus = _sample_point_distances(amp, bank)
    else:
        raise ValueError(f"unknown distance mode {mode!r}")
    order = np.argsort(mus, kind="stable")
    best = int(order[0])
    margin = float(mus[order[1]] - mus[best]) if len(mus) > 1 else math.inf
    return ClassificationResult(
        decision=formats[best],
        distances=dict(zip(formats, mus)),
        margin=margin,
        k_samples=amp.size,
        clipped=int(np.count_nonzero(amp > bank.grid.max)),
    )


@lru_cache(maxsize=256)
def build_reference_bank(
    osnr_db: float,
    symbol_rate_baud: float,
    method: BankMethod = "analytic",
    n_ref: int = DEFAULT_N_REF,
    seed: int = 0,
    grid: AmplitudeGrid | None = None,
    qam8_geometry: str = DEFAULT_QAM8_GEOMETRY,
    ref_bandwidth_hz: float = REF_BANDWIDTH_HZ,
) -> ReferenceBank:
    """Reference CDFs for every candidate at the (assumed known) OSNR.

    Banks are cached per argument tuple; a Monte Carlo bank seeds candidate m
    with ``[seed, m]``.
    """
    grid = grid or AmplitudeGrid()
    snr_db = osnr_to_snr(osnr_db, symbol_rate_baud, ref_bandwidth_hz)
    if method == "analytic":
        entries = {f: reference_cdf_analytic(f, snr_db, grid, qam8_geometry) for f in ModulationFormat}
        n_ref_out = seed_out = None
    elif method == "monte_carlo":
        entries = {
            f: reference_cdf_mc(f, snr_db, n_ref, [seed, f.index], grid, qam8_geometry)
            for f in ModulationFormat
        }
        n_ref_out, seed_out = n_ref, seed
    else:
        raise ValueError(f"unknown bank method {method!r}")
    return ReferenceBank(
        osnr_db=osnr_db,
        symbol_rate_baud=symbol_rate_baud,
        entries=entries,
        method=method,
        n_ref=n_ref_out,
        seed=seed_out,
        qam8_geometry=qam8_geometry,
    )
