"""Exact scheduling toolkit for super-agile Earth-observation constellations.

Generates benchmark instances from orbital mechanics, computes visible
time windows with duration bounds and sequence-dependent transition times,
and solves the observation scheduling problem to proven optimality (or a
bounded gap), optionally minimizing makespan lexicographically.
"""

from .astro import GeoPoint, OrbitalElements, StateVector
from .generator import build_constellation, generate_instance, generate_micro_instance
from .model import (
    Instance,
    ScheduledObservation,
    Solution,
    deserialize_instance,
    deserialize_solution,
    make_instance,
    objective_value,
    piecewise_profit,
    profit_percent,
    serialize_instance,
    serialize_solution,
    validate_instance,
    validate_schedule,
)
from .oracle import brute_force_solve
from .solver import SolverConfig, greedy_construct, sequence_feasible, solve, solve_lexicographic
from .targets import PolygonTarget, SpotTarget, Strip
from .visibility import SatelliteSpec, VisibleTimeWindow, compute_vtws, transition_time

__version__ = "0.1.0"

__all__ = [
    "GeoPoint",
    "OrbitalElements",
    "StateVector",
    "SatelliteSpec",
    "VisibleTimeWindow",
    "SpotTarget",
    "PolygonTarget",
    "Strip",
    "Instance",
    "Solution",
    "ScheduledObservation",
    "SolverConfig",
    "build_constellation",
    "generate_instance",
    "generate_micro_instance",
    "make_instance",
    "serialize_instance",
    "deserialize_instance",
    "serialize_solution",
    "deserialize_solution",
    "objective_value",
    "profit_percent",
    "piecewise_profit",
    "validate_instance",
    "validate_schedule",
    "compute_vtws",
    "transition_time",
    "solve",
    "solve_lexicographic",
    "greedy_construct",
    "sequence_feasible",
    "brute_force_solve",
    "__version__",
]
