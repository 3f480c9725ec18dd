"""Shared fixtures: hand-built tiny instances and solution assembly."""

import pytest

from saeos.astro import GeoPoint, OrbitalElements, utc
from saeos.model import (
    Solution,
    compute_makespan,
    make_instance,
    objective_value,
    profit_percent,
)
from saeos.targets import SpotTarget, Strip
from saeos.visibility import AttitudeAngles, SatelliteSpec, VisibleTimeWindow

EPOCH = utc(2025, 9, 1)


def window(sat_id, strip_id, orbit, sense, vws, vwe, att1, att2, settle=4.0, rate=6.0):
    a1 = AttitudeAngles(*att1)
    a2 = AttitudeAngles(*att2)
    p_lower = settle + max(abs(a2.roll - a1.roll), abs(a2.pitch - a1.pitch), abs(a2.yaw - a1.yaw)) / rate
    return VisibleTimeWindow(
        satellite_id=sat_id,
        strip_id=strip_id,
        orbit=orbit,
        sense=sense,
        vws=float(vws),
        vwe=float(vwe),
        p_lower=p_lower,
        p_upper=float(vwe - vws),
        attitude_sp1=a1,
        attitude_sp2=a2,
        ref_time_sp1=float(vws),
        ref_time_sp2=float(vwe),
    )


def pair_instance():
    """One satellite, two spot strips, overlapping windows with known setup times.

    Transition A-0 -> B-0 costs 9 s, B-0 -> A-0 costs 10.667 s; strip B also
    has a later conflict-free window on orbit 2.
    """
    sat = SatelliteSpec(
        id="m1", elements=OrbitalElements(6998.0, 0.001, 97.9, 0.0, 0.0, 90.0, EPOCH)
    )
    spot_a = SpotTarget("A", GeoPoint(-70.0, -70.0), 5)
    spot_b = SpotTarget("B", GeoPoint(-70.5, -70.5), 3)
    strips = [
        Strip("A-0", "A", "spot", GeoPoint(-70.05, -70.0), GeoPoint(-69.95, -70.0), 10.0, weight=5.0),
        Strip("B-0", "B", "spot", GeoPoint(-70.55, -70.5), GeoPoint(-70.45, -70.5), 20.0, weight=3.0),
    ]
    vtws = [
        window("m1", "A-0", 1, 0, 0, 100, (0, 0, 0), (6, 0, 0)),      # p_lower = 5
        window("m1", "B-0", 1, 0, 0, 200, (36, 0, 0), (40, 0, 0)),    # p_lower = 4.667
        window("m1", "B-0", 2, 0, 300, 400, (10, 0, 0), (12, 0, 0)),  # p_lower = 4.333
    ]
    return make_instance([sat], [spot_a, spot_b], [], strips, vtws, horizon=2000.0, epoch=EPOCH)


def build_solution(instance, obs_by_sat, status="feasible", upper_bound=None):
    sol = Solution(
        observations=obs_by_sat,
        objective=0.0,
        profit_percent=0.0,
        makespan=None,
        upper_bound=0.0,
        gap_percent=0.0,
        status=status,
        solve_time=0.0,
    )
    sol.objective = objective_value(instance, sol)
    sol.profit_percent = profit_percent(instance, sol)
    sol.makespan = compute_makespan(sol)
    sol.upper_bound = sol.objective if upper_bound is None else upper_bound
    return sol


@pytest.fixture
def two_strip_instance():
    return pair_instance()
