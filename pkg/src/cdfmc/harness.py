"""Seeded Monte Carlo sweeps: accuracy vs OSNR, vs sample count, required OSNR.

Trial seeds are a stable hash of (master seed, format index, OSNR in milli-dB,
K, trial index): the first 8 bytes of BLAKE2b over the five values packed as
little-endian signed 64-bit integers, read as an unsigned little-endian int.
Each cell is therefore reproducible on its own, independent of execution
order or which other cells run.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import struct
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

from cdfmc.channel import ChannelConfig, osnr_to_snr, simulate_block
from cdfmc.classifier import DEFAULT_N_REF, build_reference_bank, classify
from cdfmc.constellation import DEFAULT_QAM8_GEOMETRY, ModulationFormat, geometry_ids
from cdfmc.features import AmplitudeGrid

log = logging.getLogger(__name__)

SWEEP_CSV_HEADER = ["format", "osnr_db", "k_samples", "trials", "correct", "accuracy", "mean_margin"]
_BANK_TAG = -1


def stable_seed(*values: int) -> int:
    """64-bit seed from a tuple of integers (see module docstring)."""
    wrapped = [(int(v) + 2**63) % 2**64 - 2**63 for v in values]
    payload = struct.pack(f"<{len(wrapped)}q", *wrapped)
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


def millidb(osnr_db: float) -> int:
    return int(round(osnr_db * 1000))


def trial_seed(master_seed: int, fmt: ModulationFormat, osnr_db: float, k: int, trial: int) -> int:
    return stable_seed(master_seed, fmt.index, millidb(osnr_db), k, trial)


def bank_seed(master_seed: int, osnr_db: float) -> int:
    return stable_seed(master_seed, _BANK_TAG, millidb(osnr_db), 0, 0)


@dataclass(frozen=True)
class ExperimentSpec:
    formats: tuple[ModulationFormat, ...] = tuple(ModulationFormat)
    osnr_grid_db: tuple[float, ...] = (20.0,)
    sample_counts: tuple[int, ...] = (10_000,)
    trials: int = 500
    symbol_rate_baud: float = 32e9
    freq_offset_hz: float = 200e6
    linewidth_hz: float = 100e3
    master_seed: int = 0
    bank_method: str = "analytic"
    n_ref: int = DEFAULT_N_REF
    osnr_mismatch_db: float = 0.0
    distance_mode: str = "grid"
    qam8_geometry: str = DEFAULT_QAM8_GEOMETRY
    grid_count: int = 1000
    grid_max: float = 2.5

    def __post_init__(self) -> None:
        object.__setattr__(self, "formats", tuple(self.formats))
        object.__setattr__(self, "osnr_grid_db", tuple(float(o) for o in self.osnr_grid_db))
        object.__setattr__(self, "sample_counts", tuple(int(k) for k in self.sample_counts))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.formats or not self.osnr_grid_db or not self.sample_counts:
            raise ValueError("formats, OSNR grid and sample counts must be nonempty")
        if any(k < 1 for k in self.sample_counts):
            raise ValueError("sample counts must be positive")
        if self.symbol_rate_baud <= 0:
            raise ValueError("symbol rate must be positive")
        if self.bank_method not in ("analytic", "monte_carlo"):
            raise ValueError(f"unknown bank method {self.bank_method!r}")
        if self.distance_mode not in ("grid", "samples"):
            raise ValueError(f"unknown distance mode {self.distance_mode!r}")

    @property
    def grid(self) -> AmplitudeGrid:
        return AmplitudeGrid(self.grid_count, self.grid_max)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["formats"] = [f.name for f in self.formats]
        d["osnr_grid_db"] = list(self.osnr_grid_db)
        d["sample_counts"] = list(self.sample_counts)
        return d


@dataclass(frozen=True)
class SweepRow:
    format: ModulationFormat
    osnr_db: float
    k_samples: int
    trials: int
    correct: int
    mean_margin: float
    decisions: dict[str, int] = field(default_factory=dict, compare=False)
    clipped: int = field(default=0, compare=False)

    @property
    def accuracy(self) -> float:
        return self.correct / self.trials

    def sort_key(self) -> tuple:
        return (self.format.index, self.osnr_db, self.k_samples)


@dataclass
class SweepResult:
    rows: list[SweepRow]
    metadata: dict

    def row(self, fmt: ModulationFormat, osnr_db: float, k: int) -> SweepRow:
        for r in self.rows:
            if r.format is fmt and r.osnr_db == float(osnr_db) and r.k_samples == k:
                return r
        raise KeyError((fmt, osnr_db, k))

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self.metadata.items():
            buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SWEEP_CSV_HEADER)
        for r in self.rows:
            writer.writerow([
                r.format.name, f"{r.osnr_db:.2f}", r.k_samples, r.trials, r.correct,
                f"{r.accuracy:.4f}", f"{r.mean_margin:.6g}",
            ])
        return buf.getvalue()

    def to_json(self) -> str:
        rows = [
            {
                "format": r.format.name,
                "osnr_db": round(r.osnr_db, 2),
                "k_samples": r.k_samples,
                "trials": r.trials,
                "correct": r.correct,
                "accuracy": round(r.accuracy, 4),
                "mean_margin": r.mean_margin,
                "decisions": dict(sorted(r.decisions.items())),
                "clipped": r.clipped,
            }
            for r in self.rows
        ]
        return json.dumps({"metadata": self.metadata, "rows": rows}, indent=2, sort_keys=True) + "\n"


def _metadata(spec: ExperimentSpec) -> dict:
    from cdfmc import __version__

    return {
        "software": f"cdfmc {__version__}",
        "spec": spec.to_dict(),
        "geometry": geometry_ids(spec.qam8_geometry),
    }


def run_cell(spec: ExperimentSpec, fmt: ModulationFormat, osnr_db: float, k: int) -> SweepRow:
    bank_osnr = osnr_db + spec.osnr_mismatch_db
    bank = build_reference_bank(
        bank_osnr, spec.symbol_rate_baud, spec.bank_method, spec.n_ref,
        bank_seed(spec.master_seed, bank_osnr), spec.grid, spec.qam8_geometry,
    )
    correct = 0
    margins = 0.0
    clipped = 0
    decisions: Counter[str] = Counter()
    # per-block clipping warnings are summarized once per cell instead
    features_log = logging.getLogger("cdfmc.features")
    saved_level = features_log.level
    features_log.setLevel(logging.ERROR)
    try:
        for t in range(spec.trials):
            config = ChannelConfig(
                osnr_db=osnr_db,
                symbol_rate_baud=spec.symbol_rate_baud,
                freq_offset_hz=spec.freq_offset_hz,
                linewidth_hz=spec.linewidth_hz,
                seed=trial_seed(spec.master_seed, fmt, osnr_db, k, t),
                qam8_geometry=spec.qam8_geometry,
            )
            result = classify(simulate_block(fmt, k, config), bank, mode=spec.distance_mode)
            correct += result.decision is fmt
            margins += result.margin
            clipped += result.clipped
            decisions[result.decision.name] += 1
    finally:
        features_log.setLevel(saved_level)
    if clipped:
        log.info("%s %.2f dB K=%d: %d of %d amplitudes above grid max",
                 fmt.name, osnr_db, k, clipped, k * spec.trials)
    return SweepRow(
        format=fmt, osnr_db=float(osnr_db), k_samples=k, trials=spec.trials,
        correct=correct, mean_margin=margins / spec.trials, decisions=dict(decisions),
        clipped=clipped,
    )


def _run_cell_args(args) -> SweepRow:
    return run_cell(*args)


def run_cells(
    spec: ExperimentSpec, cells: Iterable[tuple[ModulationFormat, float, int]], jobs: int = 1
) -> list[SweepRow]:
    work = [(spec, f, float(o), int(k)) for f, o, k in cells]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(jobs) as ex:
            rows = list(ex.map(_run_cell_args, work))
    else:
        rows = [_run_cell_args(w) for w in work]
    return sorted(rows, key=SweepRow.sort_key)


def run_sweep(spec: ExperimentSpec, jobs: int = 1) -> SweepResult:
    """Accuracy for every (format, OSNR, K) cell of ``spec``."""
    cells = [(f, o, k) for f in spec.formats for o in spec.osnr_grid_db for k in spec.sample_counts]
    return SweepResult(rows=run_cells(spec, cells, jobs), metadata=_metadata(spec))


def merge_results(results: Sequence[SweepResult]) -> SweepResult:
    rows = sorted((r for res in results for r in res.rows), key=SweepRow.sort_key)
    meta = dict(results[0].metadata)
    if len(results) > 1:
        meta["cells"] = [res.metadata["spec"] for res in results]
        meta.pop("spec", None)
    return SweepResult(rows=rows, metadata=meta)


@dataclass
class RequiredOsnr:
    format: ModulationFormat
    k_samples: int
    target: float
    osnr_db: float | None
    evaluated: dict[float, float]
    fallback: bool = False

    @property
    def achieved(self) -> bool:
        return self.osnr_db is not None

    def describe(self) -> str:
        if self.osnr_db is None:
            return f"{self.format.name} K={self.k_samples}: not achieved"
        return f"{self.format.name} K={self.k_samples}: {self.osnr_db:.2f} dB"

    def to_dict(self) -> dict:
        return {
            "format": self.format.name,
            "k_samples": self.k_samples,
            "target": self.target,
            "required_osnr_db": self.osnr_db if self.osnr_db is not None else "not achieved",
            "fallback_scan": self.fallback,
            "evaluated": {f"{o:.2f}": round(a, 4) for o, a in sorted(self.evaluated.items())},
        }


def required_osnr(
    fmt: ModulationFormat,
    k: int,
    target: float = 1.0,
    search_range_db: tuple[float, float] = (0.0, 30.0),
    spec: ExperimentSpec | None = None,
    step_db: float = 0.5,
) -> RequiredOsnr:
    """Smallest grid OSNR from which accuracy stays at or above ``target``.

    Bisects under a monotonicity assumption, then checks the two grid points
    above the boundary; if any check disagrees with monotonicity the whole
    grid is scanned and the lowest OSNR above which every grid point passes
    is returned.  ``osnr_db`` is None when the target is never reached.
    """
    if not 0 < target <= 1:
        raise ValueError("target accuracy must lie in (0, 1]")
    lo, hi = search_range_db
    if hi < lo:
        raise ValueError("empty search range")
    spec = spec or ExperimentSpec()
    grid = [round(lo + i * step_db, 6) for i in range(int(math.floor((hi - lo) / step_db + 1e-9)) + 1)]
    evaluated: dict[float, float] = {}

    def passes(i: int) -> bool:
        o = grid[i]
        if o not in evaluated:
            evaluated[o] = run_cell(spec, fmt, o, k).accuracy
        return evaluated[o] >= target - 1e-12

    def full_scan() -> RequiredOsnr:
        answer = None
        for i in range(len(grid) - 1, -1, -1):
            if not passes(i):
                break
            answer = grid[i]
        return RequiredOsnr(fmt, k, target, answer, evaluated, fallback=True)

    if not passes(len(grid) - 1):
        return full_scan()
    if passes(0):
        boundary = 0
    else:
        a, b = 0, len(grid) - 1  # fails at a, passes at b
        while b - a > 1:
            mid = (a + b) // 2
            if passes(mid):
                b = mid
            else:
                a = mid
        boundary = b
    for i in range(boundary + 1, min(boundary + 3, len(grid))):
        if not passes(i):
            return full_scan()
    return RequiredOsnr(fmt, k, target, grid[boundary], evaluated)


def snr_for(spec: ExperimentSpec, osnr_db: float) -> float:
    return osnr_to_snr(osnr_db, spec.symbol_rate_baud)
