"""Candidate M-QAM alphabets, normalized to unit average power.

All geometries live in ``_GEOMETRIES``; 8-QAM has two registered variants
("circular", the default, and "rectangular") selected by name.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

DEFAULT_QAM8_GEOMETRY = "circular"


class ModulationFormat(enum.Enum):
    """Candidate formats; the value is the 1-based candidate index."""

    QAM4 = 1
    QAM8 = 2
    QAM16 = 3
    QAM32 = 4
    QAM64 = 5

    @property
    def index(self) -> int:
        return self.value

    @property
    def order(self) -> int:
        return _ORDERS[self]

    @classmethod
    def from_index(cls, index: int) -> "ModulationFormat":
        return cls(index)

    @classmethod
    def parse(cls, text: str) -> "ModulationFormat":
        """Accept ``QAM16``, ``16qam``, ``16-QAM`` or plain ``16``."""
        key = text.strip().upper().replace("-", "").replace("_", "")
        key = key.replace("QAM", "")
        for fmt in cls:
            if str(fmt.order) == key:
                return fmt
        raise ValueError(f"unknown modulation format: {text!r}")

    def __str__(self) -> str:
        return self.name


_ORDERS = {
    ModulationFormat.QAM4: 4,
    ModulationFormat.QAM8: 8,
    ModulationFormat.QAM16: 16,
    ModulationFormat.QAM32: 32,
    ModulationFormat.QAM64: 64,
}


def _square(side: int) -> np.ndarray:
    levels = np.arange(-(side - 1), side, 2, dtype=float)
    re, im = np.meshgrid(levels, levels, indexing="ij")
    return (re + 1j * im).ravel()


def _cross32() -> np.ndarray:
    pts = _square(6)
    corner = (np.abs(pts.real) == 5) & (np.abs(pts.imag) == 5)
    return pts[~corner]


def _circular8() -> np.ndarray:
    # inner square at r1 = sqrt(2); outer square rotated 45 deg at r1 (1 + sqrt 3) / sqrt 2
    inner = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j])
    r1 = np.sqrt(2.0)
    r2 = r1 * (1.0 + np.sqrt(3.0)) / np.sqrt(2.0)
    outer = r2 * np.array([1, 1j, -1, -1j])
    return np.concatenate([inner, outer])


def _rectangular8() -> np.ndarray:
    re = np.array([-3.0, -1.0, 1.0, 3.0])
    return np.concatenate([re + 1j, re - 1j])


_GEOMETRIES: dict[tuple[ModulationFormat, str], Callable[[], np.ndarray]] = {
    (ModulationFormat.QAM4, "square"): lambda: _square(2),
    (ModulationFormat.QAM8, "circular"): _circular8,
    (ModulationFormat.QAM8, "rectangular"): _rectangular8,
    (ModulationFormat.QAM16, "square"): lambda: _square(4),
    (ModulationFormat.QAM32, "cross"): _cross32,
    (ModulationFormat.QAM64, "square"): lambda: _square(8),
}

QAM8_GEOMETRIES = tuple(g for (f, g) in _GEOMETRIES if f is ModulationFormat.QAM8)


def geometry_name(fmt: ModulationFormat, qam8_geometry: str = DEFAULT_QAM8_GEOMETRY) -> str:
    if fmt is ModulationFormat.QAM8:
        if qam8_geometry not in QAM8_GEOMETRIES:
            raise ValueError(
                f"unknown 8-QAM geometry {qam8_geometry!r}; choose from {QAM8_GEOMETRIES}"
            )
        return qam8_geometry
    return next(g for (f, g) in _GEOMETRIES if f is fmt)


def geometry_ids(qam8_geometry: str = DEFAULT_QAM8_GEOMETRY) -> dict[str, str]:
    """Geometry identifier per format, for experiment metadata."""
    return {fmt.name: geometry_name(fmt, qam8_geometry) for fmt in ModulationFormat}


@dataclass(frozen=True, eq=False)
class Constellation:
    format: ModulationFormat
    points: np.ndarray
    geometry: str

    def __post_init__(self) -> None:
        self.points.setflags(write=False)

    @property
    def order(self) -> int:
        return len(self.points)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["re", "im"])
        for p in self.points:
            writer.writerow([f"{p.real:.17g}", f"{p.imag:.17g}"])
        return buf.getvalue()


@lru_cache(maxsize=None)
def constellation_points(
    fmt: ModulationFormat, qam8_geometry: str = DEFAULT_QAM8_GEOMETRY
) -> Constellation:
    """Canonical unit-power alphabet for ``fmt``, sorted by (real, imag)."""
    geometry = geometry_name(fmt, qam8_geometry)
    raw = _GEOMETRIES[(fmt, geometry)]()
    raw = raw[np.lexsort((raw.imag, raw.real))]
    pts = raw / np.sqrt(np.mean(np.abs(raw) ** 2))
    return Constellation(format=fmt, points=pts, geometry=geometry)


def amplitude_levels(
    constellation: Constellation, tol: float = 1e-9
) -> list[tuple[float, int]]:
    """Distinct point radii (ascending) with their multiplicities.

    Radii closer than ``tol`` are merged; the level radius is their mean.
    """
    radii = np.sort(np.abs(constellation.points))
    levels: list[list[float]] = []
    for r in radii:
        if levels and r - levels[-1][-1] <= tol:
            levels[-1].append(float(r))
        else:
            levels.append([float(r)])
    return [(float(np.mean(group)), len(group)) for group in levels]
