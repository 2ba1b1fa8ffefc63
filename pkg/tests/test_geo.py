import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quietvoyage.geo import (
    BathymetryGrid,
    CoordinateError,
    GeoPoint,
    GridRangeError,
    PlanarPoint,
    RegionMask,
    blocked_fraction,
    from_planar,
    is_navigable,
    read_ascii_grid,
    read_mask,
    to_planar,
    write_ascii_grid,
    write_mask,
)

REF = GeoPoint(48.5, -123.0)


def test_projection_identity_at_reference():
    p = to_planar(REF, REF)
    assert p.x == 0.0 and p.y == 0.0


def test_projection_one_degree_north_at_equator():
    ref = GeoPoint(0.0, 0.0)
    p = to_planar(GeoPoint(1.0, 0.0), ref)
    assert abs(p.y - 111_195.0) < 1.0  # pi * R / 180
    assert abs(p.x) < 1e-9


def test_projection_round_trip_small():
    p = GeoPoint(48.7123456, -123.3987654, 25.0)
    back = from_planar(to_planar(p, REF), REF, depth=p.depth)
    assert abs(back.lat - p.lat) < 1e-9
    assert abs(back.lon - p.lon) < 1e-9


@settings(max_examples=200, deadline=None)
@given(
    lat=st.floats(47.5, 49.5),
    lon=st.floats(-124.0, -122.0),
)
def test_projection_round_trip_property(lat, lon):
    p = GeoPoint(lat, lon)
    back = from_planar(to_planar(p, REF), REF)
    assert abs(back.lat - p.lat) < 1e-9
    assert abs(back.lon - p.lon) < 1e-9


def test_projection_round_trip_thousand_points():
    rng = np.random.default_rng(7)
    lats = rng.uniform(47.5, 49.5, 1000)
    lons = rng.uniform(-124.0, -122.0, 1000)
    worst = 0.0
    for lat, lon in zip(lats, lons):
        back = from_planar(to_planar(GeoPoint(lat, lon), REF), REF)
        worst = max(worst, abs(back.lat - lat), abs(back.lon - lon))
    assert worst < 1e-9


def test_projection_rejects_near_pole():
    with pytest.raises(CoordinateError):
        to_planar(GeoPoint(89.5, 0.0), REF)


def test_geopoint_validation():
    with pytest.raises(CoordinateError):
        GeoPoint(91.0, 0.0)
    with pytest.raises(CoordinateError):
        GeoPoint(0.0, 181.0)
    with pytest.raises(CoordinateError):
        GeoPoint(0.0, 0.0, -1.0)
    with pytest.raises(CoordinateError):
        PlanarPoint(float("nan"), 0.0)


def _flat_grid(depth_value=100.0, rows=5, cols=5, cell=0.01):
    depth = np.full((rows, cols), depth_value)
    return BathymetryGrid(GeoPoint(48.0, -123.0), cell, depth)


class TestDepthAt:
    def test_node_value(self):
        grid = _flat_grid()
        grid.depth[2, 3] = 222.0
        p = GeoPoint(48.0 + 2 * 0.01, -123.0 + 3 * 0.01)
        assert grid.depth_at(p) == pytest.approx(222.0)

    def test_constant_field(self):
        grid = _flat_grid(100.0)
        p = GeoPoint(48.0123, -122.9777)
        assert grid.depth_at(p) == pytest.approx(100.0)

    def test_manual_bilinear_cell_center(self):
        grid = _flat_grid()
        grid.depth[0, 0] = 100.0
        grid.depth[0, 1] = 100.0
        grid.depth[1, 0] = 200.0
        grid.depth[1, 1] = 200.0
        p = GeoPoint(48.005, -122.995)
        assert grid.depth_at(p) == pytest.approx(150.0)

    def test_out_of_bounds(self):
        grid = _flat_grid()
        with pytest.raises(GridRangeError):
            grid.depth_at(GeoPoint(47.0, -123.0))

    def test_within_corner_bounds_property(self):
        rng = np.random.default_rng(3)
        grid = BathymetryGrid(GeoPoint(48.0, -123.0), 0.01, rng.uniform(10, 300, (6, 6)))
        for _ in range(200):
            lat = rng.uniform(48.0, 48.05)
            lon = rng.uniform(-123.0, -122.95)
            d = grid.depth_at(GeoPoint(lat, lon))
            r = int((lat - 48.0) / 0.01)
            c = int((lon + 123.0) / 0.01)
            corners = grid.depth[r : r + 2, c : c + 2]
            assert corners.min() - 1e-9 <= d <= corners.max() + 1e-9


class TestNavigability:
    def setup_method(self):
        self.grid = _flat_grid(200.0)
        self.grid.depth[2, 2] = -50.0  # island
        self.grid.depth[0, 0] = 10.0   # shallow spot
        lane = np.ones_like(self.grid.depth, dtype=bool)
        lane[4, 4] = False
        self.mask = RegionMask.from_grid(self.grid, lane)

    def test_land_cell(self):
        p = GeoPoint(48.02, -122.98)
        assert not is_navigable(p, self.mask, self.grid, 15.0)

    def test_lane_deep_cell(self):
        p = GeoPoint(48.01, -122.99)
        assert is_navigable(p, self.mask, self.grid, 15.0)

    def test_depth_predicate(self):
        p = GeoPoint(48.0, -123.0)
        assert not is_navigable(p, self.mask, self.grid, 15.0)

    def test_off_lane_cell(self):
        p = GeoPoint(48.04, -122.96)
        assert not is_navigable(p, self.mask, self.grid, 15.0)

    def test_mask_disjoint_invariant(self):
        with pytest.raises(ValueError):
            RegionMask(np.ones((2, 2), dtype=bool), np.ones((2, 2), dtype=bool))


class TestBlockedFraction:
    def setup_method(self):
        depth = np.full((40, 40), 150.0)
        depth[18:22, 18:22] = -30.0  # island block in the middle
        self.grid = BathymetryGrid(GeoPoint(48.0, -123.0), 0.005, depth)

    def test_open_water(self):
        a = GeoPoint(48.01, -122.99)
        b = GeoPoint(48.03, -122.97)
        assert blocked_fraction(a, b, self.grid) == 0.0

    def test_crossing_island_partial(self):
        a = GeoPoint(48.05, -122.95)
        b = GeoPoint(48.14, -122.86)
        f = blocked_fraction(a, b, self.grid)
        assert 0.0 < f < 1.0

    def test_inside_island_fully_blocked(self):
        a = GeoPoint(48.0925, -122.9075)
        b = GeoPoint(48.0975, -122.9025)
        assert blocked_fraction(a, b, self.grid) == 1.0

    def test_symmetry(self):
        a = GeoPoint(48.05, -122.95)
        b = GeoPoint(48.14, -122.86)
        assert blocked_fraction(a, b, self.grid) == pytest.approx(
            blocked_fraction(b, a, self.grid), abs=1e-12
        )

    @settings(max_examples=50, deadline=None)
    @given(
        lat1=st.floats(48.0, 48.19), lon1=st.floats(-123.0, -122.81),
        lat2=st.floats(48.0, 48.19), lon2=st.floats(-123.0, -122.81),
    )
    def test_range_and_symmetry_property(self, lat1, lon1, lat2, lon2):
        a, b = GeoPoint(lat1, lon1), GeoPoint(lat2, lon2)
        f = blocked_fraction(a, b, self.grid)
        assert 0.0 <= f <= 1.0
        assert f == pytest.approx(blocked_fraction(b, a, self.grid), abs=1e-12)


def test_ascii_grid_round_trip(tmp_path):
    rng = np.random.default_rng(11)
    grid = BathymetryGrid(GeoPoint(48.25, -123.5), 0.01, rng.uniform(-50, 300, (7, 9)))
    path = tmp_path / "bathy.asc"
    write_ascii_grid(path, grid)
    loaded = read_ascii_grid(path)
    assert loaded.rows == 7 and loaded.cols == 9
    assert loaded.origin.lat == pytest.approx(48.25)
    assert loaded.origin.lon == pytest.approx(-123.5)
    np.testing.assert_allclose(loaded.depth, grid.depth)


def test_mask_round_trip(tmp_path):
    grid = _flat_grid(rows=4, cols=6)
    mask = np.zeros((4, 6), dtype=bool)
    mask[1:3, 2:5] = True
    path = tmp_path / "lane.asc"
    write_mask(path, grid, mask)
    loaded = read_mask(path, grid)
    np.testing.assert_array_equal(loaded, mask)


def test_mask_shape_mismatch(tmp_path):
    grid = _flat_grid(rows=4, cols=6)
    other = _flat_grid(rows=5, cols=6)
    path = tmp_path / "lane.asc"
    write_mask(path, other, np.ones((5, 6), dtype=bool))
    with pytest.raises(ValueError):
        read_mask(path, grid)
