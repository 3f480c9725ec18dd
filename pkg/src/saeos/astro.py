"""Two-body orbit propagation and Earth-fixed geometry.

All downstream geometry (visibility windows, pointing angles, ground
targets) is built on the primitives here: a Kepler-equation solver,
classical element to state-vector conversion, and the rotating-Earth /
spherical-Earth frame conventions.

Conventions:
  - Times are real seconds since the scheduling epoch.
  - The Earth rotation angle is zero at the scheduling epoch, so ECI and
    ECEF coincide at t = 0.
  - Spherical Earth of radius ``EARTH_RADIUS_KM``; no perturbations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

# Physical constants
MU_EARTH = 398600.4418       # gravitational parameter, km^3/s^2 (WGS-84)
EARTH_RADIUS_KM = 6378.137   # spherical Earth radius, km
EARTH_ROTATION_RATE = 7.2921159e-5  # rad/s

# Kepler solver settings
KEPLER_TOL = 1e-12
KEPLER_MAX_ITER = 50


class KeplerConvergenceError(ArithmeticError):
    """Newton iteration on Kepler's equation failed to converge."""


@dataclass(frozen=True)
class OrbitalElements:
    """Classical orbital elements; angles in degrees, lengths in km."""

    semi_major_axis: float
    eccentricity: float
    inclination: float
    raan: float
    arg_perigee: float
    mean_anomaly_epoch: float
    epoch: datetime

    def __post_init__(self) -> None:
        if self.semi_major_axis <= EARTH_RADIUS_KM:
            raise ValueError(f"semi-major axis {self.semi_major_axis} km is below Earth's radius")
        if not 0.0 <= self.eccentricity < 1.0:
            raise ValueError(f"eccentricity {self.eccentricity} outside [0, 1)")
        if not 0.0 <= self.inclination <= 180.0:
            raise ValueError(f"inclination {self.inclination} outside [0, 180]")


@dataclass(frozen=True)
class StateVector:
    """Inertial position/velocity at a time offset from the scheduling epoch."""

    position: np.ndarray  # km, shape (3,)
    velocity: np.ndarray  # km/s, shape (3,)
    time: float           # seconds since epoch

    def __post_init__(self) -> None:
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "velocity", np.asarray(self.velocity, dtype=float))


@dataclass(frozen=True)
class GeoPoint:
    """Geodetic point on the spherical Earth, degrees."""

    latitude: float
    longitude: float

    def __post_init__(self) -> None:
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude {self.latitude} outside [-90, 90]")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"longitude {self.longitude} outside [-180, 180]")


def solve_kepler(mean_anomaly: float, eccentricity: float) -> float:
    """Solve E - e*sin(E) = M for the eccentric anomaly E (radians).

    Newton iteration from E0 = M, driven to a residual below 1e-12.
    """
    if not 0.0 <= eccentricity < 1.0:
        raise ValueError(f"eccentricity {eccentricity} outside [0, 1)")
    m = float(mean_anomaly)
    e = float(eccentricity)
    ecc_anomaly = m if e < 0.8 else math.pi
    for _ in range(KEPLER_MAX_ITER):
        residual = ecc_anomaly - e * math.sin(ecc_anomaly) - m
        if abs(residual) <= KEPLER_TOL:
            return ecc_anomaly
        ecc_anomaly -= residual / (1.0 - e * math.cos(ecc_anomaly))
    residual = ecc_anomaly - e * math.sin(ecc_anomaly) - m
    if abs(residual) <= KEPLER_TOL:
        return ecc_anomaly
    raise KeplerConvergenceError(
        f"no convergence after {KEPLER_MAX_ITER} iterations (M={m}, e={e}, residual={residual:g})"
    )


def _solve_kepler_array(mean_anomaly: np.ndarray, eccentricity: float) -> np.ndarray:
    """Vectorized Newton iteration for ephemeris sampling."""
    m = np.asarray(mean_anomaly, dtype=float)
    ecc = np.where(eccentricity < 0.8, m, np.pi * np.ones_like(m))
    for _ in range(KEPLER_MAX_ITER):
        residual = ecc - eccentricity * np.sin(ecc) - m
        if np.all(np.abs(residual) <= KEPLER_TOL):
            break
        ecc = ecc - residual / (1.0 - eccentricity * np.cos(ecc))
    return ecc


def orbital_period(semi_major_axis: float) -> float:
    """Orbital period T = 2*pi*sqrt(a^3 / mu), seconds."""
    if semi_major_axis <= 0:
        raise ValueError("semi-major axis must be positive")
    return 2.0 * math.pi * math.sqrt(semi_major_axis**3 / MU_EARTH)


def orbit_index(t: float, period: float) -> int:
    """1-based index of the orbit containing time t."""
    if t < 0:
        raise ValueError("time must be non-negative")
    if period <= 0:
        raise ValueError("period must be positive")
    return int(t // period) + 1


def _perifocal_to_inertial(elements: OrbitalElements) -> np.ndarray:
    raan = math.radians(elements.raan)
    inc = math.radians(elements.inclination)
    argp = math.radians(elements.arg_perigee)
    co, so = math.cos(raan), math.sin(raan)
    ci, si = math.cos(inc), math.sin(inc)
    cw, sw = math.cos(argp), math.sin(argp)
    return np.array(
        [
            [co * cw - so * sw * ci, -co * sw - so * cw * ci, so * si],
            [so * cw + co * sw * ci, -so * sw + co * cw * ci, -co * si],
            [sw * si, cw * si, ci],
        ]
    )


def propagate(elements: OrbitalElements, t: float) -> StateVector:
    """State vector at t seconds past the element epoch (two-body motion)."""
    if t < 0:
        raise ValueError("time must be non-negative")
    a = elements.semi_major_axis
    e = elements.eccentricity
    n = 2.0 * math.pi / orbital_period(a)
    m = math.radians(elements.mean_anomaly_epoch) + n * t
    m = math.fmod(m, 2.0 * math.pi)
    ecc_anomaly = solve_kepler(m, e)

    cos_e, sin_e = math.cos(ecc_anomaly), math.sin(ecc_anomaly)
    r = a * (1.0 - e * cos_e)
    sqrt1me2 = math.sqrt(1.0 - e * e)
    pos_pf = np.array([a * (cos_e - e), a * sqrt1me2 * sin_e, 0.0])
    edot = n * a / r
    vel_pf = np.array([-edot * a * sin_e, edot * a * sqrt1me2 * cos_e, 0.0])

    rot = _perifocal_to_inertial(elements)
    return StateVector(position=rot @ pos_pf, velocity=rot @ vel_pf, time=t)


def _propagate_positions(elements: OrbitalElements, times: np.ndarray) -> np.ndarray:
    """Inertial positions at many times, shape (n, 3). Ephemeris fast path."""
    a = elements.semi_major_axis
    e = elements.eccentricity
    n = 2.0 * math.pi / orbital_period(a)
    m = np.mod(math.radians(elements.mean_anomaly_epoch) + n * np.asarray(times, dtype=float), 2.0 * math.pi)
    ecc = _solve_kepler_array(m, e)
    cos_e, sin_e = np.cos(ecc), np.sin(ecc)
    pos_pf = np.stack(
        [a * (cos_e - e), a * math.sqrt(1.0 - e * e) * sin_e, np.zeros_like(ecc)], axis=1
    )
    return pos_pf @ _perifocal_to_inertial(elements).T


def earth_rotation_angle(t: float) -> float:
    """Rotation of the Earth-fixed frame past the inertial frame at t, radians."""
    return EARTH_ROTATION_RATE * t


def eci_to_ecef(state: StateVector) -> np.ndarray:
    """Earth-fixed position of an inertial state (rotation about the spin axis)."""
    return _rotate_z(state.position, earth_rotation_angle(state.time))


def _rotate_z(vec: np.ndarray, theta: float) -> np.ndarray:
    """Express an inertial vector in a frame rotated by theta about +z."""
    c, s = math.cos(theta), math.sin(theta)
    x, y, z = vec
    return np.array([c * x + s * y, -s * x + c * y, z])


def _rotate_z_many(vecs: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    c, s = np.cos(thetas), np.sin(thetas)
    x, y, z = vecs[:, 0], vecs[:, 1], vecs[:, 2]
    return np.stack([c * x + s * y, -s * x + c * y, z], axis=1)


def ecef_velocity(state: StateVector) -> np.ndarray:
    """Earth-fixed velocity: rotated inertial velocity minus the frame spin term."""
    theta = earth_rotation_angle(state.time)
    r_ecef = _rotate_z(state.position, theta)
    v_rot = _rotate_z(state.velocity, theta)
    omega = np.array([0.0, 0.0, EARTH_ROTATION_RATE])
    return v_rot - np.cross(omega, r_ecef)


def geo_to_ecef(point: GeoPoint) -> np.ndarray:
    """Earth-fixed position of a surface point on the spherical Earth."""
    lat = math.radians(point.latitude)
    lon = math.radians(point.longitude)
    return EARTH_RADIUS_KM * np.array(
        [math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat)]
    )


def ecef_to_geo(position: np.ndarray) -> GeoPoint:
    """Latitude/longitude under a position vector (spherical Earth)."""
    x, y, z = position
    lat = math.degrees(math.atan2(z, math.hypot(x, y)))
    lon = math.degrees(math.atan2(y, x))
    return GeoPoint(latitude=lat, longitude=lon)


def utc(year: int, month: int, day: int, hour: int = 0, minute: int = 0, second: int = 0) -> datetime:
    """Shorthand for a timezone-aware UTC instant."""
    return datetime(year, month, day, hour, minute, second, tzinfo=timezone.utc)
