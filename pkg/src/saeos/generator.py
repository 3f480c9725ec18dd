"""Benchmark instance generation.

Builds the four-satellite constellation (shared orbit, mean anomalies 90,
95, 100, 105 degrees), draws targets for one of the seven configurations
A-G, decomposes them into strips, computes every visible time window over
the horizon, and assembles a validated :class:`~saeos.model.Instance`.

Per-instance seeds are derived by hashing (master seed, letter, index), so
adding instances to a batch never reshuffles earlier ones.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np

from .astro import GeoPoint, OrbitalElements, utc
from .model import DEFAULT_EPOCH, Instance, make_instance
from .targets import (
    PolygonTarget,
    SpotTarget,
    Strip,
    decompose_polygon,
    decompose_spot,
    generate_targets,
    swath_width,
)
from .visibility import (
    AttitudeAngles,
    SatelliteSpec,
    SatelliteTrack,
    VisibleTimeWindow,
    compute_vtws,
)

# target mix per configuration letter: (spot count, polygon count)
CONFIG_TARGET_COUNTS = {
    "A": (0, 1),
    "B": (50, 0),
    "C": (50, 1),
    "D": (0, 3),
    "E": (50, 3),
    "F": (0, 5),
    "G": (50, 5),
}

CONSTELLATION_MEAN_ANOMALIES = (90.0, 95.0, 100.0, 105.0)


def build_constellation(epoch=DEFAULT_EPOCH) -> list[SatelliteSpec]:
    """Four identical satellites spaced along one sun-synchronous-like orbit."""
    sats = []
    for i, mean_anomaly in enumerate(CONSTELLATION_MEAN_ANOMALIES, start=1):
        elements = OrbitalElements(
            semi_major_axis=6998.0,
            eccentricity=0.001,
            inclination=97.9,
            raan=0.0,
            arg_perigee=0.0,
            mean_anomaly_epoch=mean_anomaly,
            epoch=epoch,
        )
        sats.append(SatelliteSpec(id=f"sat{i}", elements=elements))
    return sats


def derive_seed(master_seed: int, letter: str, index: int) -> int:
    """Stable per-instance seed; independent of batch size and run order."""
    digest = hashlib.sha256(f"{master_seed}:{letter}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def generate_instance(letter: str, index: int, master_seed: int, horizon: float = 86400.0) -> Instance:
    """One benchmark instance of the given configuration letter."""
    if letter not in CONFIG_TARGET_COUNTS:
        raise ValueError(f"unknown configuration {letter!r}, expected one of {sorted(CONFIG_TARGET_COUNTS)}")
    n_spots, n_polys = CONFIG_TARGET_COUNTS[letter]
    rng = np.random.default_rng(derive_seed(master_seed, letter, index))
    satellites = build_constellation()
    spots, polygons = generate_targets(n_spots, n_polys, rng)
    width = swath_width(satellites[0].altitude, satellites[0].fov)
    strips: list[Strip] = [decompose_spot(s, width, rng) for s in spots]
    for poly in polygons:
        strips.extend(decompose_polygon(poly, width))

    vtws: list[VisibleTimeWindow] = []
    for sat in satellites:
        track = SatelliteTrack(sat, horizon)
        for strip in strips:
            vtws.extend(compute_vtws(sat, strip, horizon, track=track))
    return make_instance(satellites, spots, polygons, strips, vtws, horizon=horizon)


def _micro_polygon(poly_id: str, center: GeoPoint) -> PolygonTarget:
    offsets = [(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (0.0, 0.7), (-0.5, 0.5)]
    vertices = tuple(
        GeoPoint(center.latitude + dy, center.longitude + dx) for dx, dy in offsets
    )
    return PolygonTarget(id=poly_id, vertices=vertices, weight=8.0, area=100.0, weight_factor=2)


def generate_micro_instance(
    seed: int,
    max_strips: int = 5,
    max_vtws: int = 10,
    max_satellites: int = 2,
    horizon: float = 2000.0,
) -> Instance:
    """Small synthetic instance with hand-drawn windows, for oracle testing.

    Windows are drawn directly (no orbital propagation) with random
    attitudes, so the instances are tiny but exercise the full timing and
    objective machinery, including window conflicts on one satellite.
    """
    rng = np.random.default_rng(seed)
    n_sats = int(rng.integers(1, max_satellites + 1))
    epoch = utc(2025, 9, 1)
    satellites = [
        SatelliteSpec(
            id=f"m{i+1}",
            elements=OrbitalElements(6998.0, 0.001, 97.9, 0.0, 0.0, 90.0 + 5.0 * i, epoch),
        )
        for i in range(n_sats)
    ]

    n_strips = int(rng.integers(1, max_strips + 1))
    polygons: list[PolygonTarget] = []
    spots: list[SpotTarget] = []
    strips: list[Strip] = []
    poly: PolygonTarget | None = None
    for k in range(n_strips):
        lat = float(rng.uniform(-71.0, -69.0))
        lon = float(rng.uniform(-71.0, -69.0))
        if rng.random() < 0.6 or k == 0:
            spot = SpotTarget(id=f"SP{k}", location=GeoPoint(lat, lon), weight=int(rng.integers(1, 11)))
            spots.append(spot)
            strips.append(
                Strip(
                    id=f"{spot.id}-0",
                    target_id=spot.id,
                    kind="spot",
                    endpoint_a=GeoPoint(lat - 0.05, lon),
                    endpoint_b=GeoPoint(lat + 0.05, lon),
                    orientation=float(rng.uniform(0, 180)),
                    weight=float(spot.weight),
                )
            )
        else:
            if poly is None:
                poly = _micro_polygon("PG0", GeoPoint(lat, lon))
                polygons.append(poly)
            strips.append(
                Strip(
                    id=f"PG0-{k:02d}",
                    target_id="PG0",
                    kind="polygon",
                    endpoint_a=GeoPoint(lat - 0.05, lon),
                    endpoint_b=GeoPoint(lat + 0.05, lon),
                    orientation=float(rng.uniform(0, 180)),
                    covered_area=float(rng.uniform(15.0, 60.0)),
                )
            )

    n_vtws = int(rng.integers(n_strips, max_vtws + 1))
    vtws: list[VisibleTimeWindow] = []
    used_keys = set()
    for k in range(n_vtws):
        strip = strips[k % n_strips]  # every strip gets at least one window
        for _ in range(50):
            sat = satellites[int(rng.integers(0, n_sats))]
            orbit = int(rng.integers(1, 4))
            sense = int(rng.integers(0, 2))
            key = (sat.id, strip.id, orbit, sense)
            if key not in used_keys:
                used_keys.add(key)
                break
        else:
            continue
        att1 = AttitudeAngles(*(float(v) for v in rng.uniform(-55.0, 55.0, 2)), float(rng.uniform(-60.0, 60.0)))
        att2 = AttitudeAngles(*(float(v) for v in rng.uniform(-55.0, 55.0, 2)), float(rng.uniform(-60.0, 60.0)))
        p_lower = sat.settling_time + max(
            abs(att2.roll - att1.roll) / sat.roll_rate,
            abs(att2.pitch - att1.pitch) / sat.pitch_rate,
            abs(att2.yaw - att1.yaw) / sat.yaw_rate,
        )
        vws = float(rng.integers(0, 1200))
        vwe = vws + float(rng.integers(int(math.ceil(p_lower)) + 1, 140))
        vtws.append(
            VisibleTimeWindow(
                satellite_id=sat.id,
                strip_id=strip.id,
                orbit=orbit,
                sense=sense,
                vws=vws,
                vwe=vwe,
                p_lower=p_lower,
                p_upper=vwe - vws,
                attitude_sp1=att1,
                attitude_sp2=att2,
                ref_time_sp1=vws,
                ref_time_sp2=vwe,
            )
        )
    return make_instance(satellites, spots, polygons, strips, vtws, horizon=horizon, epoch=epoch)
