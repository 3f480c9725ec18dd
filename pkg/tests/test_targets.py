"""Target generation and strip decomposition tests."""

import math

import numpy as np
import pytest

from saeos.astro import GeoPoint
from saeos.targets import (
    InvalidPolygonError,
    PolygonTarget,
    SpotTarget,
    Strip,
    TangentPlane,
    decompose_polygon,
    decompose_spot,
    generate_targets,
    polygon_area,
    swath_width,
)

SWATH = swath_width(6998.0 - 6378.137, 1.3)


def rect_polygon(length: float, height: float, angle_deg: float = 0.0,
                 center: GeoPoint = GeoPoint(-70.0, -70.0)) -> PolygonTarget:
    """Rectangle as a 5-vertex polygon (one collinear midpoint vertex)."""
    plane = TangentPlane(center)
    corners = [(-length / 2, -height / 2), (length / 2, -height / 2), (length / 2, height / 2),
               (0.0, height / 2), (-length / 2, height / 2)]
    # center on the vertex mean so the decomposition's tangent plane anchor
    # coincides with the construction plane (exact projection round trip)
    mx = sum(x for x, _ in corners) / len(corners)
    my = sum(y for _, y in corners) / len(corners)
    corners = [(x - mx, y - my) for x, y in corners]
    rad = math.radians(angle_deg)
    c, s = math.cos(rad), math.sin(rad)
    vertices = tuple(plane.to_geo(x * c - y * s, x * s + y * c) for x, y in corners)
    return PolygonTarget(id="R", vertices=vertices, weight=1.0, area=length * height, weight_factor=1)


def point_in_polygon(x: float, y: float, points) -> bool:
    """Ray-casting membership oracle, independent of the clipping code."""
    inside = False
    n = len(points)
    for i in range(n):
        x0, y0 = points[i - 1]
        x1, y1 = points[i]
        if (y0 > y) != (y1 > y):
            t = (y - y0) / (y1 - y0)
            if x < x0 + t * (x1 - x0):
                inside = not inside
    return inside


class TestGenerateTargets:
    def test_spots_in_region_with_integer_weights(self):
        spots, polys = generate_targets(50, 0, np.random.default_rng(42))
        assert len(spots) == 50 and not polys
        for s in spots:
            assert -75.0 <= s.location.latitude <= -65.0
            assert -75.0 <= s.location.longitude <= -65.0
            assert 1 <= s.weight <= 10 and isinstance(s.weight, int)

    def test_polygon_shape_and_weight_rule(self):
        _, polys = generate_targets(0, 5, np.random.default_rng(1))
        for p in polys:
            assert len(p.vertices) in (5, 6)
            assert p.area > 0
            assert 1 <= p.weight_factor <= 10
            assert p.weight == p.area / 25.0 * p.weight_factor

    def test_polygon_area_plausible_scale(self):
        areas = []
        for seed in range(20):
            _, polys = generate_targets(0, 1, np.random.default_rng(seed))
            areas.append(polys[0].area)
        # order of magnitude of the intended benchmark region shapes
        assert min(areas) > 3e3
        assert max(areas) < 4e5

    def test_empty(self):
        assert generate_targets(0, 0, np.random.default_rng(0)) == ([], [])

    def test_deterministic(self):
        a = generate_targets(10, 3, np.random.default_rng(77))
        b = generate_targets(10, 3, np.random.default_rng(77))
        assert a == b

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError):
            generate_targets(-1, 0, np.random.default_rng(0))


class TestPolygonArea:
    def test_unit_degree_square_at_equator(self):
        square = [GeoPoint(0, 0), GeoPoint(0, 1), GeoPoint(1, 1), GeoPoint(1, 0)]
        # (111.3195 km)^2 from the 1-degree arc on this sphere
        assert polygon_area(square) == pytest.approx(12392.03, rel=0.01)

    def test_winding_independent(self):
        square = [GeoPoint(0, 0), GeoPoint(0, 1), GeoPoint(1, 1), GeoPoint(1, 0)]
        assert polygon_area(square) == polygon_area(list(reversed(square)))

    def test_translation_stability(self):
        base = [GeoPoint(-70, -70), GeoPoint(-70, -69), GeoPoint(-69, -69), GeoPoint(-69, -70)]
        moved = [GeoPoint(v.latitude + 0.1, v.longitude + 0.1) for v in base]
        assert polygon_area(moved) == pytest.approx(polygon_area(base), rel=0.005)

    def test_degenerate_rejected(self):
        with pytest.raises(InvalidPolygonError):
            polygon_area([GeoPoint(0, 0), GeoPoint(0, 0), GeoPoint(1, 1)])


class TestSwathWidth:
    def test_table_parameters(self):
        # frozen from 2 * (6998 - 6378.137) * tan(0.65 deg)
        assert swath_width(6998.0 - 6378.137, 1.3) == pytest.approx(14.064848730895473, abs=1e-9)

    def test_zero_fov(self):
        assert swath_width(600.0, 0.0) == 0.0

    def test_linear_in_altitude(self):
        assert swath_width(1200.0, 1.3) == pytest.approx(2 * swath_width(600.0, 1.3), rel=1e-12)


class TestDecomposePolygon:
    def test_single_band_rectangle(self):
        poly = rect_polygon(100.0, SWATH)
        strips = decompose_polygon(poly, SWATH)
        assert len(strips) == 1
        strip = strips[0]
        plane = TangentPlane(GeoPoint(-70.0, -70.0))
        ax, ay = plane.to_xy(strip.endpoint_a)
        bx, by = plane.to_xy(strip.endpoint_b)
        assert math.hypot(bx - ax, by - ay) == pytest.approx(100.0, rel=1e-3)
        assert strip.covered_area == pytest.approx(poly.area, rel=1e-3)

    def test_square_band_count_and_area_partition(self):
        poly = rect_polygon(50.0, 50.0)
        strips = decompose_polygon(poly, SWATH)
        assert len(strips) == math.ceil(50.0 / SWATH) == 4
        assert sum(s.covered_area for s in strips) == pytest.approx(2500.0, rel=1e-3)

    def test_orientation_follows_long_edge(self):
        # swath-matched short sides: the along-long-edge sweep is then optimal
        for height in [SWATH, 2 * SWATH]:
            for angle in [0.0, 23.0, 37.0, 90.0, 141.0]:
                poly = rect_polygon(120.0, height, angle_deg=angle)
                strips = decompose_polygon(poly, SWATH)
                got = strips[0].orientation % 180.0
                diff = min(abs(got - angle), 180.0 - abs(got - angle))
                assert diff <= 1.0 + 1e-9, (height, angle, got)

    def test_generated_polygon_strip_counts(self):
        for seed in range(10):
            _, polys = generate_targets(0, 1, np.random.default_rng(seed))
            strips = decompose_polygon(polys[0], SWATH)
            assert 10 <= len(strips) <= 60
            assert sum(s.covered_area for s in strips) == pytest.approx(polys[0].area, rel=0.01)
            for s in strips:
                assert s.covered_area <= polys[0].area + 1e-6

    def test_monte_carlo_coverage(self):
        rng = np.random.default_rng(5)
        _, polys = generate_targets(0, 3, rng)
        for poly in polys:
            strips = decompose_polygon(poly, SWATH)
            plane = TangentPlane(
                GeoPoint(
                    sum(v.latitude for v in poly.vertices) / len(poly.vertices),
                    sum(v.longitude for v in poly.vertices) / len(poly.vertices),
                )
            )
            points = [plane.to_xy(v) for v in poly.vertices]
            xs = [p[0] for p in points]
            ys = [p[1] for p in points]
            bands = []
            for s in strips:
                ax, ay = plane.to_xy(s.endpoint_a)
                bx, by = plane.to_xy(s.endpoint_b)
                length = math.hypot(bx - ax, by - ay)
                dx, dy = (bx - ax) / length, (by - ay) / length
                bands.append((ax, ay, dx, dy, length))
            hits = total = 0
            draw = np.random.default_rng(99)
            while total < 10_000:
                x = draw.uniform(min(xs), max(xs))
                y = draw.uniform(min(ys), max(ys))
                if not point_in_polygon(x, y, points):
                    continue
                total += 1
                for ax, ay, dx, dy, length in bands:
                    along = (x - ax) * dx + (y - ay) * dy
                    perp = abs(-(x - ax) * dy + (y - ay) * dx)
                    if -1e-6 <= along <= length + 1e-6 and perp <= SWATH / 2 + 1e-6:
                        hits += 1
                        break
            assert hits / total >= 0.999

    def test_rejects_bad_width(self):
        with pytest.raises(ValueError):
            decompose_polygon(rect_polygon(50.0, 50.0), 0.0)


class TestDecomposeSpot:
    def test_weight_copied_and_single_strip(self):
        spot = SpotTarget("S00", GeoPoint(-70.0, -68.0), 7)
        strip = decompose_spot(spot, SWATH, np.random.default_rng(0))
        assert isinstance(strip, Strip)
        assert strip.kind == "spot"
        assert strip.weight == 7.0
        assert strip.covered_area is None

    def test_midpoint_is_spot_location(self):
        spot = SpotTarget("S01", GeoPoint(-72.5, -66.25), 3)
        strip = decompose_spot(spot, SWATH, np.random.default_rng(4))
        mid_lat = (strip.endpoint_a.latitude + strip.endpoint_b.latitude) / 2
        mid_lon = (strip.endpoint_a.longitude + strip.endpoint_b.longitude) / 2
        assert mid_lat == pytest.approx(spot.location.latitude, abs=1e-9)
        assert mid_lon == pytest.approx(spot.location.longitude, abs=1e-9)

    def test_length_equals_width(self):
        spot = SpotTarget("S02", GeoPoint(-70.0, -70.0), 1)
        strip = decompose_spot(spot, SWATH, np.random.default_rng(8))
        plane = TangentPlane(spot.location)
        ax, ay = plane.to_xy(strip.endpoint_a)
        bx, by = plane.to_xy(strip.endpoint_b)
        assert math.hypot(bx - ax, by - ay) == pytest.approx(SWATH, rel=1e-9)

    def test_orientation_deterministic_per_seed(self):
        spot = SpotTarget("S03", GeoPoint(-70.0, -70.0), 5)
        a = decompose_spot(spot, SWATH, np.random.default_rng(123))
        b = decompose_spot(spot, SWATH, np.random.default_rng(123))
        assert a == b
        assert 0.0 <= a.orientation < 180.0
