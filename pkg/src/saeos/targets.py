"""Ground targets and their decomposition into imaging strips.

Spot targets become a single square-footprint strip with a random
orientation; polygonal targets are covered by parallel bands of one swath
width, with the band orientation chosen by a 1-degree sweep that minimizes
the total centerline length.

Planar geometry is done on a local tangent plane anchored at the shape's
vertex centroid; the generation region is a 10x10 degree box, so the
projection distortion stays small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .astro import EARTH_RADIUS_KM, GeoPoint

# Generation region (latitudes 75S-65S, longitudes 75W-65W)
TARGET_LAT_RANGE = (-75.0, -65.0)
TARGET_LON_RANGE = (-75.0, -65.0)

# Polygon shape parameters. The vertex radius range is calibrated so that
# generated areas land in the tens-of-thousands to ~3e5 km^2 span and a
# one-swath decomposition yields a few dozen strips.
POLYGON_VERTEX_COUNTS = (5, 6)
POLYGON_RADIUS_RANGE_KM = (170.0, 380.0)
POLYGON_WEIGHT_AREA_DIVISOR = 25.0

# Integer weight factor range shared by spots and polygons
WEIGHT_FACTOR_RANGE = (1, 10)

ORIENTATION_SWEEP_STEP_DEG = 1.0

KM_PER_DEG = EARTH_RADIUS_KM * math.pi / 180.0

_DEGENERATE_AREA_KM2 = 1e-9


class InvalidPolygonError(ValueError):
    """Polygon has fewer than three distinct vertices or zero area."""


@dataclass(frozen=True)
class SpotTarget:
    id: str
    location: GeoPoint
    weight: int

    def __post_init__(self) -> None:
        if not WEIGHT_FACTOR_RANGE[0] <= self.weight <= WEIGHT_FACTOR_RANGE[1]:
            raise ValueError(f"spot weight {self.weight} outside {WEIGHT_FACTOR_RANGE}")


@dataclass(frozen=True)
class PolygonTarget:
    id: str
    vertices: tuple[GeoPoint, ...]
    weight: float
    area: float
    weight_factor: int  # integer u with weight == (area / 25) * u

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        if len(self.vertices) not in POLYGON_VERTEX_COUNTS:
            raise ValueError(f"polygon must have 5 or 6 vertices, got {len(self.vertices)}")
        if self.area <= 0:
            raise ValueError("polygon area must be positive")


@dataclass(frozen=True)
class Strip:
    """One imaging task: a centerline segment between two geodetic endpoints."""

    id: str
    target_id: str
    kind: str  # "spot" | "polygon"
    endpoint_a: GeoPoint
    endpoint_b: GeoPoint
    orientation: float  # centerline direction, degrees from local east
    weight: float | None = None        # spot-derived strips only
    covered_area: float | None = None  # polygon-derived strips only

    def __post_init__(self) -> None:
        if self.kind not in ("spot", "polygon"):
            raise ValueError(f"unknown strip kind {self.kind!r}")
        if self.endpoint_a == self.endpoint_b:
            raise ValueError("strip endpoints must differ")


class TangentPlane:
    """Local equirectangular km-plane anchored at a reference point."""

    def __init__(self, origin: GeoPoint):
        self.origin = origin
        self._kx = KM_PER_DEG * math.cos(math.radians(origin.latitude))
        self._ky = KM_PER_DEG

    def to_xy(self, point: GeoPoint) -> tuple[float, float]:
        return (
            (point.longitude - self.origin.longitude) * self._kx,
            (point.latitude - self.origin.latitude) * self._ky,
        )

    def to_geo(self, x: float, y: float) -> GeoPoint:
        return GeoPoint(
            latitude=self.origin.latitude + y / self._ky,
            longitude=self.origin.longitude + x / self._kx,
        )


def _vertex_centroid(vertices) -> GeoPoint:
    lat = sum(v.latitude for v in vertices) / len(vertices)
    lon = sum(v.longitude for v in vertices) / len(vertices)
    return GeoPoint(lat, lon)


def _segments_cross(p, q, r, s) -> bool:
    """Proper intersection test for segments pq and rs."""

    def orient(a, b, c):
        val = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if abs(val) < 1e-12:
            return 0
        return 1 if val > 0 else -1

    o1, o2 = orient(p, q, r), orient(p, q, s)
    o3, o4 = orient(r, s, p), orient(r, s, q)
    return o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4)


def _is_simple(points) -> bool:
    """True if no two non-adjacent polygon edges intersect."""
    n = len(points)
    edges = [(points[i], points[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if _segments_cross(*edges[i], *edges[j]):
                return False
    return True


def _shoelace(points: list[tuple[float, float]]) -> float:
    total = 0.0
    n = len(points)
    for i in range(n):
        x0, y0 = points[i - 1]
        x1, y1 = points[i]
        total += x0 * y1 - x1 * y0
    return abs(total) / 2.0


def polygon_area(vertices) -> float:
    """Shoelace area (km^2) on the tangent plane at the vertex centroid."""
    distinct = {(v.latitude, v.longitude) for v in vertices}
    if len(distinct) < 3:
        raise InvalidPolygonError(f"need >= 3 distinct vertices, got {len(distinct)}")
    plane = TangentPlane(_vertex_centroid(vertices))
    area = _shoelace([plane.to_xy(v) for v in vertices])
    if area <= 0.0:
        raise InvalidPolygonError("polygon has zero area")
    return area


def swath_width(altitude: float, fov: float) -> float:
    """Ground swath width (km) of a sensor with the given full field of view."""
    if altitude <= 0:
        raise ValueError("altitude must be positive")
    return 2.0 * altitude * math.tan(math.radians(fov) / 2.0)


def generate_targets(
    n_spots: int, n_polys: int, rng: np.random.Generator
) -> tuple[list[SpotTarget], list[PolygonTarget]]:
    """Draw spot and polygonal targets uniformly inside the generation region.

    Spots get integer weights in [1, 10]; each polygon is a star-shaped 5-6
    vertex shape around its center (sorted random bearings, radii uniform in
    [60, 190] km) weighted by (area / 25) times an integer in [1, 10].
    """
    if n_spots < 0 or n_polys < 0:
        raise ValueError("target counts must be non-negative")
    spots = []
    for idx in range(n_spots):
        location = GeoPoint(
            latitude=rng.uniform(*TARGET_LAT_RANGE),
            longitude=rng.uniform(*TARGET_LON_RANGE),
        )
        weight = int(rng.integers(WEIGHT_FACTOR_RANGE[0], WEIGHT_FACTOR_RANGE[1] + 1))
        spots.append(SpotTarget(id=f"S{idx:02d}", location=location, weight=weight))

    polygons = []
    for idx in range(n_polys):
        center = GeoPoint(
            latitude=rng.uniform(*TARGET_LAT_RANGE),
            longitude=rng.uniform(*TARGET_LON_RANGE),
        )
        n_vertices = int(rng.integers(POLYGON_VERTEX_COUNTS[0], POLYGON_VERTEX_COUNTS[-1] + 1))
        plane = TangentPlane(center)
        # redraw shapes that self-intersect (all bearings in one half-plane
        # can put the center outside and let the closing edge cross another)
        for _ in range(1000):
            bearings = np.sort(rng.uniform(0.0, 2.0 * math.pi, size=n_vertices))
            radii = rng.uniform(*POLYGON_RADIUS_RANGE_KM, size=n_vertices)
            xy = [(r * math.cos(b), r * math.sin(b)) for b, r in zip(bearings, radii)]
            if _is_simple(xy):
                break
        else:
            raise RuntimeError("could not draw a simple polygon in 1000 attempts")
        vertices = tuple(plane.to_geo(x, y) for x, y in xy)
        area = polygon_area(vertices)
        factor = int(rng.integers(WEIGHT_FACTOR_RANGE[0], WEIGHT_FACTOR_RANGE[1] + 1))
        polygons.append(
            PolygonTarget(
                id=f"P{idx}",
                vertices=vertices,
                weight=area / POLYGON_WEIGHT_AREA_DIVISOR * factor,
                area=area,
                weight_factor=factor,
            )
        )
    return spots, polygons


def _clip_halfplane(points, keep_above: bool, c: float):
    """Sutherland-Hodgman clip against y >= c (or y <= c)."""
    sign = 1.0 if keep_above else -1.0
    out = []
    n = len(points)
    for i in range(n):
        prev = points[i - 1]
        cur = points[i]
        prev_in = sign * (prev[1] - c) >= 0.0
        cur_in = sign * (cur[1] - c) >= 0.0
        if cur_in != prev_in:
            t = (c - prev[1]) / (cur[1] - prev[1])
            out.append((prev[0] + t * (cur[0] - prev[0]), c))
        if cur_in:
            out.append(cur)
    return out


def _band_slices(points, width: float):
    """Per-band (x_lo, x_hi, area, y_center) of a polygon cut into horizontal bands."""
    ys = [p[1] for p in points]
    y_min, y_max = min(ys), max(ys)
    n_bands = max(1, math.ceil((y_max - y_min) / width - 1e-12))
    slices = []
    for band in range(n_bands):
        lo = y_min + band * width
        clipped = _clip_halfplane(points, True, lo)
        clipped = _clip_halfplane(clipped, False, lo + width)
        if len(clipped) < 3:
            slices.append(None)
            continue
        area = _shoelace(clipped)
        xs = [p[0] for p in clipped]
        x_lo, x_hi = min(xs), max(xs)
        if area < _DEGENERATE_AREA_KM2 or x_hi - x_lo < 1e-9:
            slices.append(None)
            continue
        slices.append((x_lo, x_hi, area, lo + width / 2.0))
    return slices


def decompose_polygon(poly: PolygonTarget, width: float) -> list[Strip]:
    """Cover a polygon with parallel strips of the given width.

    Candidate orientations 0..179 degrees are swept at 1-degree steps; the
    orientation minimizing the total centerline length wins, ties going to
    the smaller angle. Each strip records the polygon area inside its band,
    so the per-polygon covered areas partition the polygon.
    """
    if width <= 0:
        raise ValueError("strip width must be positive")
    plane = TangentPlane(_vertex_centroid(poly.vertices))
    points = [plane.to_xy(v) for v in poly.vertices]

    best = None  # (total_length, theta, slices)
    theta = 0.0
    while theta < 180.0:
        rad = math.radians(theta)
        cos_t, sin_t = math.cos(rad), math.sin(rad)
        rotated = [(x * cos_t + y * sin_t, -x * sin_t + y * cos_t) for x, y in points]
        slices = _band_slices(rotated, width)
        total = sum(s[1] - s[0] for s in slices if s is not None)
        if best is None or total < best[0] - 1e-9:
            best = (total, theta, slices)
        theta += ORIENTATION_SWEEP_STEP_DEG

    _, theta, slices = best
    rad = math.radians(theta)
    cos_t, sin_t = math.cos(rad), math.sin(rad)
    strips = []
    for band, s in enumerate(slices):
        if s is None:
            continue
        x_lo, x_hi, area, y_c = s
        # rotate the centerline back into the tangent plane
        ax, ay = x_lo * cos_t - y_c * sin_t, x_lo * sin_t + y_c * cos_t
        bx, by = x_hi * cos_t - y_c * sin_t, x_hi * sin_t + y_c * cos_t
        strips.append(
            Strip(
                id=f"{poly.id}-{band:02d}",
                target_id=poly.id,
                kind="polygon",
                endpoint_a=plane.to_geo(ax, ay),
                endpoint_b=plane.to_geo(bx, by),
                orientation=theta,
                covered_area=area,
            )
        )
    return strips


def decompose_spot(spot: SpotTarget, width: float, rng: np.random.Generator) -> Strip:
    """Single square-footprint strip centered on the spot, random orientation."""
    if width <= 0:
        raise ValueError("strip width must be positive")
    theta = float(rng.uniform(0.0, 180.0))
    rad = math.radians(theta)
    half = width / 2.0
    plane = TangentPlane(spot.location)
    return Strip(
        id=f"{spot.id}-0",
        target_id=spot.id,
        kind="spot",
        endpoint_a=plane.to_geo(-half * math.cos(rad), -half * math.sin(rad)),
        endpoint_b=plane.to_geo(half * math.cos(rad), half * math.sin(rad)),
        orientation=theta,
        weight=float(spot.weight),
    )
