"""Visible time windows, pointing attitudes, and maneuver timing.

A strip is visible when the off-nadir angles to *both* of its endpoints sit
inside the satellite's maneuvering cone at the same instant. Each maximal
visible interval is found by a fixed-step scan refined by bisection, split
at orbit boundaries, rounded inward to whole seconds, and emitted once per
imaging sense.

Pointing attitudes are evaluated in the Earth-fixed frame (the along-track
axis follows the ground-track velocity). Endpoint attitudes are taken at
the instant of closest approach to the endpoint within the window, which
makes duration bounds and transition times constants of the instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .astro import (
    EARTH_ROTATION_RATE,
    GeoPoint,
    OrbitalElements,
    StateVector,
    _propagate_positions,
    _rotate_z_many,
    ecef_velocity,
    eci_to_ecef,
    geo_to_ecef,
    orbit_index,
    orbital_period,
    propagate,
)
from .targets import Strip, TangentPlane

DEFAULT_HORIZON = 86400.0
DEFAULT_SCAN_STEP = 1.0
BOUNDARY_REFINE_TOL = 0.01  # seconds

SENSES = (0, 1)


class UndefinedDirectionError(ValueError):
    """Pointing direction is undefined (target coincides with the satellite)."""


class PointingInfeasibleError(ValueError):
    """Target lies at or beyond 90 degrees off nadir."""


class TransitionDomainError(ValueError):
    """Transition time queried across two different satellites."""


@dataclass(frozen=True)
class SatelliteSpec:
    """Orbit plus maneuvering and imaging parameters of one satellite."""

    id: str
    elements: OrbitalElements
    max_maneuver_angle: float = 60.0  # degrees, same limit on all axes
    roll_rate: float = 6.0            # degrees/s
    pitch_rate: float = 6.0           # degrees/s
    yaw_rate: float = 6.0             # degrees/s
    fov: float = 1.3                  # degrees, full sensor field of view
    settling_time: float = 4.0        # seconds

    def __post_init__(self) -> None:
        for name in ("max_maneuver_angle", "roll_rate", "pitch_rate", "yaw_rate", "fov", "settling_time"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def altitude(self) -> float:
        from .astro import EARTH_RADIUS_KM

        return self.elements.semi_major_axis - EARTH_RADIUS_KM


@dataclass(frozen=True)
class AttitudeAngles:
    roll: float
    pitch: float
    yaw: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.roll, self.pitch, self.yaw)


@dataclass(frozen=True)
class VisibleTimeWindow:
    """One (satellite, strip, orbit, sense) observation opportunity."""

    satellite_id: str
    strip_id: str
    orbit: int
    sense: int
    vws: float
    vwe: float
    p_lower: float
    p_upper: float
    attitude_sp1: AttitudeAngles
    attitude_sp2: AttitudeAngles
    ref_time_sp1: float
    ref_time_sp2: float

    def __post_init__(self) -> None:
        if self.sense not in SENSES:
            raise ValueError(f"sense must be 0 or 1, got {self.sense}")
        if not self.vws < self.vwe:
            raise ValueError(f"empty window [{self.vws}, {self.vwe}]")
        if abs(self.p_upper - (self.vwe - self.vws)) > 1e-9:
            raise ValueError("p_upper must equal vwe - vws")
        if not 0.0 < self.p_lower <= self.p_upper + 1e-9:
            raise ValueError(f"invalid duration bounds [{self.p_lower}, {self.p_upper}]")

    @property
    def key(self) -> tuple[str, str, int, int]:
        return (self.satellite_id, self.strip_id, self.orbit, self.sense)


def off_nadir_angle(state: StateVector, ground_point_ecef: np.ndarray) -> float:
    """Angle (degrees) between the Earth-fixed nadir and the line to a point."""
    r_ecef = eci_to_ecef(state)
    d = np.asarray(ground_point_ecef, dtype=float) - r_ecef
    dn = np.linalg.norm(d)
    if dn < 1e-12:
        raise UndefinedDirectionError("ground point coincides with the satellite position")
    cosang = float(-r_ecef @ d) / (np.linalg.norm(r_ecef) * dn)
    return math.degrees(math.acos(max(-1.0, min(1.0, cosang))))


def _orbital_frame(r_ecef: np.ndarray, v_ecef: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Right-handed (along-track, cross-track, nadir) unit triad."""
    z_hat = -r_ecef / np.linalg.norm(r_ecef)
    y_hat = np.cross(z_hat, v_ecef)
    y_hat = y_hat / np.linalg.norm(y_hat)
    x_hat = np.cross(y_hat, z_hat)
    return x_hat, y_hat, z_hat


def ground_track_azimuth(r_ecef: np.ndarray, v_ecef: np.ndarray) -> float:
    """Bearing (degrees from north, clockwise) of the sub-satellite motion."""
    x, y, _ = r_ecef
    lon = math.atan2(y, x)
    lat = math.atan2(r_ecef[2], math.hypot(x, y))
    east = np.array([-math.sin(lon), math.cos(lon), 0.0])
    north = np.array([-math.sin(lat) * math.cos(lon), -math.sin(lat) * math.sin(lon), math.cos(lat)])
    return math.degrees(math.atan2(float(v_ecef @ east), float(v_ecef @ north)))


def _wrap_yaw(delta_deg: float) -> float:
    """Fold an azimuth difference into (-90, 90] (a line has two azimuths)."""
    w = delta_deg % 180.0
    if w > 90.0:
        w -= 180.0
    return w


def attitude_to_point(state: StateVector, target_ecef: np.ndarray, strip_azimuth: float) -> AttitudeAngles:
    """Roll/pitch/yaw to point the sensor at a ground point along a strip line.

    Roll tilts about the along-track axis, pitch about the cross-track axis;
    yaw is the smaller rotation between the ground-track azimuth and the
    strip's centerline azimuth.
    """
    if off_nadir_angle(state, target_ecef) >= 90.0:
        raise PointingInfeasibleError("target is at or beyond the horizon of pointing geometry")
    r_ecef = eci_to_ecef(state)
    v_ecef = ecef_velocity(state)
    x_hat, y_hat, z_hat = _orbital_frame(r_ecef, v_ecef)
    u = np.asarray(target_ecef, dtype=float) - r_ecef
    u = u / np.linalg.norm(u)
    roll = math.degrees(math.atan2(float(u @ y_hat), float(u @ z_hat)))
    pitch = math.degrees(math.atan2(float(u @ x_hat), float(u @ z_hat)))
    yaw = _wrap_yaw(strip_azimuth - ground_track_azimuth(r_ecef, v_ecef))
    return AttitudeAngles(roll=roll, pitch=pitch, yaw=yaw)


def strip_azimuth(strip: Strip) -> float:
    """Bearing (degrees from north) of the strip centerline."""
    mid = GeoPoint(
        (strip.endpoint_a.latitude + strip.endpoint_b.latitude) / 2.0,
        (strip.endpoint_a.longitude + strip.endpoint_b.longitude) / 2.0,
    )
    plane = TangentPlane(mid)
    ax, ay = plane.to_xy(strip.endpoint_a)
    bx, by = plane.to_xy(strip.endpoint_b)
    return math.degrees(math.atan2(bx - ax, by - ay))


def processing_lower_bound(sat: SatelliteSpec, attitude_sp1: AttitudeAngles, attitude_sp2: AttitudeAngles) -> float:
    """Minimum imaging duration: settle plus the slowest-axis attitude sweep."""
    return sat.settling_time + max(
        abs(attitude_sp2.roll - attitude_sp1.roll) / sat.roll_rate,
        abs(attitude_sp2.pitch - attitude_sp1.pitch) / sat.pitch_rate,
        abs(attitude_sp2.yaw - attitude_sp1.yaw) / sat.yaw_rate,
    )


def transition_time(sat: SatelliteSpec, from_vtw: VisibleTimeWindow, to_vtw: VisibleTimeWindow) -> float:
    """Setup time between consecutive observations on one satellite.

    Measured from the end attitude of the first window to the start attitude
    of the second; asymmetric in general.
    """
    if from_vtw.satellite_id != sat.id or to_vtw.satellite_id != sat.id:
        raise TransitionDomainError(
            f"transition on satellite {sat.id} queried for windows of "
            f"{from_vtw.satellite_id} -> {to_vtw.satellite_id}"
        )
    return sat.settling_time + max(
        abs(to_vtw.attitude_sp1.roll - from_vtw.attitude_sp2.roll) / sat.roll_rate,
        abs(to_vtw.attitude_sp1.pitch - from_vtw.attitude_sp2.pitch) / sat.pitch_rate,
        abs(to_vtw.attitude_sp1.yaw - from_vtw.attitude_sp2.yaw) / sat.yaw_rate,
    )


class SatelliteTrack:
    """Sampled Earth-fixed ephemeris of one satellite over the horizon.

    Precomputing the track once makes the per-strip visibility scan a pair
    of vectorized angle evaluations instead of hundreds of thousands of
    scalar propagations.
    """

    def __init__(self, sat: SatelliteSpec, horizon: float = DEFAULT_HORIZON, step: float = DEFAULT_SCAN_STEP):
        if step <= 0:
            raise ValueError("scan step must be positive")
        self.sat = sat
        self.horizon = float(horizon)
        self.step = float(step)
        self.times = np.arange(0.0, self.horizon + step / 2.0, step)
        eci = _propagate_positions(sat.elements, self.times)
        self.positions = _rotate_z_many(eci, EARTH_ROTATION_RATE * self.times)
        self._radius = np.linalg.norm(self.positions, axis=1)
        self.period = orbital_period(sat.elements.semi_major_axis)

    def cos_off_nadir(self, point_ecef: np.ndarray) -> np.ndarray:
        """cos(off-nadir angle) to a fixed ground point at every sample."""
        d = np.asarray(point_ecef, dtype=float)[None, :] - self.positions
        num = -np.einsum("ij,ij->i", self.positions, d)
        return num / (self._radius * np.linalg.norm(d, axis=1))

    def above_horizon(self, point_ecef: np.ndarray) -> np.ndarray:
        """True where the satellite is above the point's local horizon.

        Screens out the antipodal branch where the off-nadir cone would
        otherwise point through the Earth; for this constellation the
        maneuver cone is strictly tighter than the horizon, so this never
        trims a genuine window boundary.
        """
        p = np.asarray(point_ecef, dtype=float)
        return self.positions @ p >= p @ p

    def state(self, t: float) -> StateVector:
        return propagate(self.sat.elements, t)


def _cos_off_nadir_scalar(state: StateVector, point_ecef: np.ndarray) -> float:
    r_ecef = eci_to_ecef(state)
    d = np.asarray(point_ecef, dtype=float) - r_ecef
    return float(-r_ecef @ d) / (np.linalg.norm(r_ecef) * np.linalg.norm(d))


def _make_visibility_predicate(sat: SatelliteSpec, point_a, point_b, threshold: float):
    """Scalar-math visibility test, hot path of the boundary bisections."""
    el = sat.elements
    a = el.semi_major_axis
    ecc = el.eccentricity
    n = 2.0 * math.pi / orbital_period(a)
    m0 = math.radians(el.mean_anomaly_epoch)
    rot = _perifocal_rows(el)
    sqrt1me2 = math.sqrt(1.0 - ecc * ecc)
    pax, pay, paz = (float(v) for v in point_a)
    pbx, pby, pbz = (float(v) for v in point_b)
    ra2 = pax * pax + pay * pay + paz * paz
    rb2 = pbx * pbx + pby * pby + pbz * pbz

    def visible(t: float) -> bool:
        m = math.fmod(m0 + n * t, 2.0 * math.pi)
        big_e = m
        for _ in range(12):
            delta = (big_e - ecc * math.sin(big_e) - m) / (1.0 - ecc * math.cos(big_e))
            big_e -= delta
            if abs(delta) < 1e-13:
                break
        xp = a * (math.cos(big_e) - ecc)
        yp = a * sqrt1me2 * math.sin(big_e)
        xi = rot[0][0] * xp + rot[0][1] * yp
        yi = rot[1][0] * xp + rot[1][1] * yp
        zi = rot[2][0] * xp + rot[2][1] * yp
        theta = EARTH_ROTATION_RATE * t
        ct, st = math.cos(theta), math.sin(theta)
        x = ct * xi + st * yi
        y = -st * xi + ct * yi
        z = zi
        rnorm = math.sqrt(x * x + y * y + z * z)
        for px, py, pz, p2 in ((pax, pay, paz, ra2), (pbx, pby, pbz, rb2)):
            dx, dy, dz = px - x, py - y, pz - z
            dn = math.sqrt(dx * dx + dy * dy + dz * dz)
            cosang = -(x * dx + y * dy + z * dz) / (rnorm * dn)
            if cosang < threshold:
                return False
            if x * px + y * py + z * pz < p2:
                return False
        return True

    return visible


def _perifocal_rows(elements: OrbitalElements):
    from .astro import _perifocal_to_inertial

    mat = _perifocal_to_inertial(elements)
    return [[float(mat[i, j]) for j in range(3)] for i in range(3)]


def _bisect_crossing(visible, t_out: float, t_in: float) -> float:
    """Refine a visibility crossing; returns the inside-most bracket point."""
    while abs(t_in - t_out) > BOUNDARY_REFINE_TOL:
        mid = (t_in + t_out) / 2.0
        if visible(mid):
            t_in = mid
        else:
            t_out = mid
    return t_in


def _refine_max(fn, lo: float, hi: float) -> float:
    """Ternary search for the maximum of a unimodal function on [lo, hi]."""
    while hi - lo > BOUNDARY_REFINE_TOL:
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if fn(m1) < fn(m2):
            lo = m1
        else:
            hi = m2
    return (lo + hi) / 2.0


def _closest_approach(
    track: SatelliteTrack, cos_grid: np.ndarray, point: np.ndarray, vws: float, vwe: float
) -> float:
    """Instant of minimum off-nadir angle to a point within a window.

    Uses the already-sampled track: grid argmax of the cosine, refined by
    parabolic interpolation (the angle rate vanishes at closest approach, so
    the quadratic fit is accurate there); clipped windows pin to the edge.
    """
    idx_lo = math.ceil((vws - track.times[0]) / track.step - 1e-9)
    idx_hi = math.floor((vwe - track.times[0]) / track.step + 1e-9)
    if idx_hi < idx_lo:
        return _refine_max(lambda t: _cos_off_nadir_scalar(track.state(t), point), vws, vwe)
    seg = cos_grid[idx_lo : idx_hi + 1]
    k = int(np.argmax(seg))
    t_best = float(track.times[idx_lo + k])
    if 0 < k < len(seg) - 1:
        denom = seg[k - 1] - 2.0 * seg[k] + seg[k + 1]
        if denom < -1e-18:
            shift = 0.5 * float(seg[k - 1] - seg[k + 1]) / float(denom)
            t_best += max(-1.0, min(1.0, shift)) * track.step
    return min(max(t_best, vws), vwe)


def compute_vtws(
    sat: SatelliteSpec,
    strip: Strip,
    horizon: float = DEFAULT_HORIZON,
    step: float = DEFAULT_SCAN_STEP,
    track: SatelliteTrack | None = None,
) -> list[VisibleTimeWindow]:
    """All visible time windows of one satellite for one strip.

    Returns one window per (orbit, sense), sorted by (orbit, sense); empty
    when the strip is never visible. Windows whose duration cannot fit the
    minimum imaging time are dropped.
    """
    if track is None:
        track = SatelliteTrack(sat, horizon, step)
    point_a = geo_to_ecef(strip.endpoint_a)
    point_b = geo_to_ecef(strip.endpoint_b)
    threshold = math.cos(math.radians(sat.max_maneuver_angle))

    cos_a = track.cos_off_nadir(point_a)
    cos_b = track.cos_off_nadir(point_b)
    visible_mask = (
        (cos_a >= threshold)
        & (cos_b >= threshold)
        & track.above_horizon(point_a)
        & track.above_horizon(point_b)
    )
    if not visible_mask.any():
        return []

    visible = _make_visibility_predicate(sat, point_a, point_b, threshold)

    # maximal visible runs on the sample grid
    padded = np.concatenate([[False], visible_mask, [False]])
    edges = np.flatnonzero(padded[1:] != padded[:-1])
    intervals = []
    for start_idx, end_idx in zip(edges[::2], edges[1::2] - 1):
        t_start = track.times[start_idx]
        if start_idx > 0:
            t_start = _bisect_crossing(visible, track.times[start_idx - 1], t_start)
        t_end = track.times[end_idx]
        if end_idx < len(track.times) - 1:
            t_end = _bisect_crossing(visible, track.times[end_idx + 1], t_end)
        intervals.append((float(t_start), float(t_end)))

    az = strip_azimuth(strip)
    windows: list[VisibleTimeWindow] = []
    for t_start, t_end in intervals:
        for lo, hi in _split_at_orbit_boundaries(t_start, t_end, track.period):
            vws = float(math.ceil(lo - 1e-9))
            vwe = float(math.floor(hi + 1e-9))
            if vws >= vwe:
                continue
            orbit = orbit_index((vws + vwe) / 2.0, track.period)

            ref_a = _closest_approach(track, cos_a, point_a, vws, vwe)
            ref_b = _closest_approach(track, cos_b, point_b, vws, vwe)
            att_a = attitude_to_point(track.state(ref_a), point_a, az)
            att_b = attitude_to_point(track.state(ref_b), point_b, az)

            p_upper = vwe - vws
            p_lower = processing_lower_bound(sat, att_a, att_b)
            if p_lower > p_upper:
                continue
            base = VisibleTimeWindow(
                satellite_id=sat.id,
                strip_id=strip.id,
                orbit=orbit,
                sense=0,
                vws=vws,
                vwe=vwe,
                p_lower=p_lower,
                p_upper=p_upper,
                attitude_sp1=att_a,
                attitude_sp2=att_b,
                ref_time_sp1=ref_a,
                ref_time_sp2=ref_b,
            )
            windows.append(base)
            windows.append(
                replace(
                    base,
                    sense=1,
                    attitude_sp1=att_b,
                    attitude_sp2=att_a,
                    ref_time_sp1=ref_b,
                    ref_time_sp2=ref_a,
                )
            )
    windows.sort(key=lambda w: (w.orbit, w.sense))
    return windows


def _split_at_orbit_boundaries(t_start: float, t_end: float, period: float):
    """Cut [t_start, t_end] at multiples of the orbital period."""
    pieces = []
    lo = t_start
    boundary = (math.floor(t_start / period) + 1) * period
    while boundary < t_end:
        pieces.append((lo, boundary))
        lo = boundary
        boundary += period
    pieces.append((lo, t_end))
    return pieces
