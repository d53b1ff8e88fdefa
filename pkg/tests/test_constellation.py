import itertools
from collections import Counter

import numpy as np
import pytest

from cdfmc.constellation import (
    QAM8_GEOMETRIES,
    ModulationFormat,
    amplitude_levels,
    constellation_points,
    geometry_ids,
)

ALL = list(ModulationFormat)


def grid_radii_sq(side):
    """Squared radii of a square integer grid with odd coordinates, by enumeration."""
    coords = range(-(side - 1), side, 2)
    return Counter(a * a + b * b for a, b in itertools.product(coords, coords))


def test_five_members_indexed_one_to_five():
    assert sorted(f.index for f in ModulationFormat) == [1, 2, 3, 4, 5]
    assert [f.order for f in ModulationFormat] == [4, 8, 16, 32, 64]
    assert ModulationFormat.from_index(3) is ModulationFormat.QAM16


@pytest.mark.parametrize("text", ["QAM16", "16qam", "16-QAM", "16", "qam_16"])
def test_parse(text):
    assert ModulationFormat.parse(text) is ModulationFormat.QAM16


def test_parse_rejects_unknown():
    with pytest.raises(ValueError):
        ModulationFormat.parse("QAM128")


@pytest.mark.parametrize("fmt", ALL)
def test_unit_power_count_and_distinct(fmt):
    c = constellation_points(fmt)
    assert c.order == fmt.order
    assert abs(np.mean(np.abs(c.points) ** 2) - 1.0) < 1e-12
    assert len(np.unique(np.round(c.points, 12))) == fmt.order


@pytest.mark.parametrize("fmt", ALL)
def test_closed_under_quarter_turn(fmt):
    pts = constellation_points(fmt).points
    key = lambda z: sorted(zip(np.round(z.real, 9), np.round(z.imag, 9)))
    assert key(pts * 1j) == key(pts)


@pytest.mark.parametrize("fmt", ALL)
def test_lexicographic_order_and_determinism(fmt):
    pts = constellation_points(fmt).points
    order = np.lexsort((pts.imag, pts.real))
    assert np.array_equal(order, np.arange(len(pts)))
    constellation_points.cache_clear()
    again = constellation_points(fmt).points
    assert np.array_equal(pts, again)


def test_points_are_read_only():
    pts = constellation_points(ModulationFormat.QAM16).points
    with pytest.raises(ValueError):
        pts[0] = 0


def test_qam4_constant_modulus():
    assert np.all(np.abs(np.abs(constellation_points(ModulationFormat.QAM4).points) - 1) < 1e-15)


@pytest.mark.parametrize("fmt, side", [(ModulationFormat.QAM16, 4), (ModulationFormat.QAM64, 8)])
def test_square_levels_match_enumeration(fmt, side):
    counts = grid_radii_sq(side)
    levels = amplitude_levels(constellation_points(fmt))
    assert [m for _, m in levels] == [counts[r2] for r2 in sorted(counts)]
    # level radii are proportional to sqrt of enumerated squared radii
    radii = np.array([r for r, _ in levels])
    expected = np.sqrt(sorted(counts))
    assert np.allclose(radii / radii[0], expected / expected[0], rtol=0, atol=1e-12)


def test_qam16_three_levels():
    assert [m for _, m in amplitude_levels(constellation_points(ModulationFormat.QAM16))] == [4, 8, 4]


def test_qam64_nine_levels_because_sqrt50_coincides():
    counts = grid_radii_sq(8)
    assert counts[50] == 12  # eight (1,7)-type points plus four (5,5)-type share a radius
    assert len(amplitude_levels(constellation_points(ModulationFormat.QAM64))) == 9


def test_qam4_level():
    levels = amplitude_levels(constellation_points(ModulationFormat.QAM4))
    assert len(levels) == 1 and levels[0][1] == 4
    assert levels[0][0] == pytest.approx(1.0, abs=1e-15)


def test_qam32_cross_geometry():
    pts = constellation_points(ModulationFormat.QAM32).points
    # 6x6 grid without corners: the largest radius is sqrt(34) of the unnormalized grid
    scale = np.sqrt(np.mean(np.abs(pts) ** 2))
    raw = np.round(pts / pts.real.max() * 5, 9)
    assert set(np.abs(raw.real)) | set(np.abs(raw.imag)) == {1.0, 3.0, 5.0}
    assert not np.any((np.abs(raw.real) == 5) & (np.abs(raw.imag) == 5))
    assert scale == pytest.approx(1.0)


def test_qam8_circular_ring_ratio():
    levels = amplitude_levels(constellation_points(ModulationFormat.QAM8))
    (r1, m1), (r2, m2) = levels
    assert (m1, m2) == (4, 4)
    assert r2 / r1 == pytest.approx((1 + np.sqrt(3)) / np.sqrt(2), abs=1e-12)


def test_qam8_rectangular_is_swappable():
    assert set(QAM8_GEOMETRIES) == {"circular", "rectangular"}
    rect = constellation_points(ModulationFormat.QAM8, "rectangular")
    assert rect.geometry == "rectangular"
    assert abs(np.mean(np.abs(rect.points) ** 2) - 1) < 1e-12
    assert [m for _, m in amplitude_levels(rect)] == [4, 4]
    assert geometry_ids("rectangular")["QAM8"] == "rectangular"
    with pytest.raises(ValueError):
        constellation_points(ModulationFormat.QAM8, "hexagonal")


@pytest.mark.parametrize("fmt", ALL)
def test_levels_round_trip_and_power(fmt):
    c = constellation_points(fmt)
    levels = amplitude_levels(c)
    radii = [r for r, _ in levels]
    assert radii == sorted(radii) and len(set(radii)) == len(radii)
    assert sum(m for _, m in levels) == fmt.order
    assert abs(sum(m * r * r for r, m in levels) / fmt.order - 1) < 1e-12
    expanded = np.repeat(radii, [m for _, m in levels])
    assert np.allclose(expanded, np.sort(np.abs(c.points)), rtol=0, atol=1e-9)


@pytest.mark.parametrize("fmt", ALL)
def test_csv_export_round_trips_exactly(fmt):
    c = constellation_points(fmt)
    lines = c.to_csv().splitlines()
    assert lines[0] == "re,im"
    back = np.array([complex(float(a), float(b)) for a, b in (l.split(",") for l in lines[1:])])
    assert np.array_equal(back, c.points)
