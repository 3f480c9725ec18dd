"""Scheduling instance/solution data model, objective, validation, and JSON I/O.

An :class:`Instance` bundles the constellation, targets, strips, visible
time windows, and the per-satellite transition-time table; it is the sole
input of the solvers. A :class:`Solution` carries per-satellite ordered
observations plus objective/bound/status metadata.

Serialization is canonical: keys sorted, floats at 17 significant digits,
so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .astro import GeoPoint, OrbitalElements, utc
from .targets import PolygonTarget, SpotTarget, Strip
from .visibility import AttitudeAngles, SatelliteSpec, VisibleTimeWindow

INSTANCE_SCHEMA = "saeos-instance/1"
SOLUTION_SCHEMA = "saeos-solution/1"

DEFAULT_EPOCH = utc(2025, 9, 1)

# validation slack for times/durations derived from stored floats
TIME_EPS = 1e-9

STATUS_OPTIMAL = "optimal"
STATUS_FEASIBLE = "feasible"
STATUS_INFEASIBLE_EMPTY = "infeasible-empty"


class PiecewiseDomainError(ValueError):
    """Coverage fraction outside [0, 1]."""


class InstanceFormatError(ValueError):
    """Malformed instance/solution document; message names the JSON path."""


class InstanceValidationError(ValueError):
    """Structurally parseable instance that breaks a model invariant."""


def piecewise_profit(x: float) -> float:
    """Profit fraction earned at covered-area fraction ``x``.

    Three linear pieces (slopes 0.25, 1.0, 2.0) that depress partial
    coverage and reward completion. Each piece is anchored at its upper
    knot so the knot values 0.1, 0.4, and 1.0 are exact in floats.
    """
    if not -TIME_EPS <= x <= 1.0 + TIME_EPS:
        raise PiecewiseDomainError(f"coverage fraction {x} outside [0, 1]")
    x = max(0.0, min(1.0, x))
    if x <= 0.4:
        return 0.25 * x
    if x <= 0.7:
        return 0.4 + (x - 0.7)
    return 1.0 + 2.0 * (x - 1.0)


class TransitionTable:
    """Per-satellite setup times between ordered window pairs.

    Entry (i, j) is the maneuver-plus-settle time from the end attitude of
    the satellite's i-th window to the start attitude of its j-th window
    (windows in instance order). Values are computed from the stored
    attitudes on demand, so memory stays linear in the window count while
    the table remains defined for every same-satellite ordered pair.
    """

    def __init__(self, per_sat: dict[str, tuple[np.ndarray, np.ndarray, np.ndarray, float]]):
        # sat_id -> (start attitudes (n,3), end attitudes (n,3), axis rates (3,), settle)
        self._per_sat = per_sat
        for sat_id, (att1, att2, rates, settle) in per_sat.items():
            if att1.shape != att2.shape or att1.ndim != 2 or (att1.size and att1.shape[1] != 3):
                raise InstanceValidationError(f"transition data for {sat_id} has inconsistent shape")
            if not (np.isfinite(att1).all() and np.isfinite(att2).all()):
                raise InstanceValidationError(f"transition data for {sat_id} has non-finite attitudes")
            if settle < 0 or (rates <= 0).any():
                raise InstanceValidationError(f"transition data for {sat_id} has bad rates")

    def window_count(self, sat_id: str) -> int:
        return len(self._per_sat[sat_id][0])

    def seconds(self, sat_id: str, i: int, j: int) -> float:
        att1, att2, rates, settle = self._per_sat[sat_id]
        return settle + float(np.max(np.abs(att1[j] - att2[i]) / rates))

    def row_seconds(self, sat_id: str, i: int) -> np.ndarray:
        """Setup times from window i to every window of the satellite."""
        att1, att2, rates, settle = self._per_sat[sat_id]
        return settle + (np.abs(att1 - att2[i]) / rates).max(axis=1)

    def raw(self, sat_id: str) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
        return self._per_sat[sat_id]

    def __eq__(self, other) -> bool:
        if not isinstance(other, TransitionTable):
            return NotImplemented
        if self._per_sat.keys() != other._per_sat.keys():
            return False
        for k in self._per_sat:
            a1, a2, r, s = self._per_sat[k]
            b1, b2, q, t = other._per_sat[k]
            if s != t or not (np.array_equal(a1, b1) and np.array_equal(a2, b2) and np.array_equal(r, q)):
                return False
        return True


def build_transition_table(satellites: list[SatelliteSpec], vtws: list[VisibleTimeWindow]) -> TransitionTable:
    """Assemble the pairwise setup-time table from the window attitudes."""
    per_sat = {}
    for sat in satellites:
        windows = [w for w in vtws if w.satellite_id == sat.id]
        att1 = np.array([w.attitude_sp1.as_tuple() for w in windows], dtype=float).reshape(len(windows), 3)
        att2 = np.array([w.attitude_sp2.as_tuple() for w in windows], dtype=float).reshape(len(windows), 3)
        rates = np.array([sat.roll_rate, sat.pitch_rate, sat.yaw_rate], dtype=float)
        per_sat[sat.id] = (att1, att2, rates, sat.settling_time)
    return TransitionTable(per_sat)


def _sorted_vtws(vtws) -> list[VisibleTimeWindow]:
    return sorted(vtws, key=lambda w: w.key)


@dataclass
class Instance:
    """A complete scheduling problem; immutable after construction."""

    satellites: list[SatelliteSpec]
    spots: list[SpotTarget]
    polygons: list[PolygonTarget]
    strips: list[Strip]
    vtws: list[VisibleTimeWindow]
    transition: TransitionTable
    horizon: float = 86400.0
    epoch: datetime = DEFAULT_EPOCH

    def __post_init__(self) -> None:
        self.vtws = _sorted_vtws(self.vtws)
        self.sat_by_id = {s.id: s for s in self.satellites}
        self.strip_by_id = {s.id: s for s in self.strips}
        self.polygon_by_id = {p.id: p for p in self.polygons}
        self.vtw_index = {w.key: i for i, w in enumerate(self.vtws)}
        self.sat_vtws: dict[str, list[int]] = {s.id: [] for s in self.satellites}
        self._local_index: list[tuple[str, int]] = []
        for i, w in enumerate(self.vtws):
            local = self.sat_vtws.setdefault(w.satellite_id, [])
            self._local_index.append((w.satellite_id, len(local)))
            local.append(i)
        self.vtws_by_strip: dict[str, list[int]] = {s.id: [] for s in self.strips}
        for i, w in enumerate(self.vtws):
            self.vtws_by_strip.setdefault(w.strip_id, []).append(i)

    def transition_seconds(self, from_idx: int, to_idx: int) -> float:
        """Setup time between two windows given by global index (same satellite)."""
        sat_a, local_a = self._local_index[from_idx]
        sat_b, local_b = self._local_index[to_idx]
        if sat_a != sat_b:
            raise KeyError(f"windows {from_idx} and {to_idx} belong to different satellites")
        return self.transition.seconds(sat_a, local_a, local_b)


def make_instance(
    satellites, spots, polygons, strips, vtws, horizon: float = 86400.0, epoch: datetime = DEFAULT_EPOCH
) -> Instance:
    """Assemble an instance, deriving the transition table from the windows."""
    vtws = _sorted_vtws(vtws)
    table = build_transition_table(satellites, vtws)
    instance = Instance(
        satellites=list(satellites),
        spots=list(spots),
        polygons=list(polygons),
        strips=list(strips),
        vtws=vtws,
        transition=table,
        horizon=horizon,
        epoch=epoch,
    )
    validate_instance(instance)
    return instance


def validate_instance(instance: Instance) -> None:
    """Raise :class:`InstanceValidationError` on any broken invariant."""
    problems = []
    if len(instance.sat_by_id) != len(instance.satellites):
        problems.append("duplicate satellite ids")
    if len(instance.strip_by_id) != len(instance.strips):
        problems.append("duplicate strip ids")
    target_ids = {t.id for t in instance.spots} | {p.id for p in instance.polygons}
    if len(target_ids) != len(instance.spots) + len(instance.polygons):
        problems.append("duplicate target ids")
    for strip in instance.strips:
        if strip.target_id not in target_ids:
            problems.append(f"strip {strip.id} references unknown target {strip.target_id}")
        if strip.kind == "spot" and strip.weight is None:
            problems.append(f"spot strip {strip.id} has no weight")
        if strip.kind == "polygon" and strip.covered_area is None:
            problems.append(f"polygon strip {strip.id} has no covered area")
    for w in instance.vtws:
        sat = instance.sat_by_id.get(w.satellite_id)
        if sat is None:
            problems.append(f"window {w.key} references unknown satellite")
            continue
        if w.strip_id not in instance.strip_by_id:
            problems.append(f"window {w.key} references unknown strip")
        if not (0.0 <= w.vws and w.vwe <= instance.horizon + TIME_EPS):
            problems.append(f"window {w.key} outside the horizon")
        for att in (w.attitude_sp1, w.attitude_sp2):
            if abs(att.roll) > sat.max_maneuver_angle + 1e-6 or abs(att.pitch) > sat.max_maneuver_angle + 1e-6:
                problems.append(f"window {w.key} stores an attitude beyond the maneuver cone")
    for sat in instance.satellites:
        n = len(instance.sat_vtws.get(sat.id, []))
        try:
            have = instance.transition.window_count(sat.id)
        except KeyError:
            problems.append(f"transition table missing for satellite {sat.id}")
            continue
        if have != n:
            problems.append(f"transition table for {sat.id} covers {have} windows, expected {n}")
    if problems:
        raise InstanceValidationError("; ".join(problems))


@dataclass(frozen=True)
class ScheduledObservation:
    """One timed strip acquisition inside a specific window."""

    satellite_id: str
    strip_id: str
    orbit: int
    sense: int
    start: float
    duration: float

    @property
    def end(self) -> float:
        return self.start + self.duration

    @property
    def vtw_key(self) -> tuple[str, str, int, int]:
        return (self.satellite_id, self.strip_id, self.orbit, self.sense)


@dataclass
class Solution:
    """Per-satellite ordered observation lists plus solve metadata."""

    observations: dict[str, list[ScheduledObservation]]
    objective: float
    profit_percent: float
    makespan: float | None
    upper_bound: float
    gap_percent: float
    status: str
    solve_time: float = field(compare=False)
    makespan_gap_percent: float | None = None  # set by lexicographic runs
    nodes_explored: int = 0

    def all_observations(self) -> list[ScheduledObservation]:
        return [o for sat in sorted(self.observations) for o in self.observations[sat]]

    def observed_strips(self) -> set[str]:
        return {o.strip_id for o in self.all_observations()}


def compute_makespan(solution: Solution) -> float | None:
    obs = solution.all_observations()
    if not obs:
        return None
    return max(o.end for o in obs)


def gap_percent(objective: float, upper_bound: float) -> float:
    """Relative bound gap in percent; zero for a degenerate zero bound."""
    if upper_bound <= TIME_EPS:
        return 0.0
    return max(0.0, 100.0 * (upper_bound - objective) / upper_bound)


def _polygon_coverage(instance: Instance, poly_id: str, observed: set[str]) -> float:
    poly = instance.polygon_by_id[poly_id]
    covered = 0.0
    for strip in instance.strips:
        if strip.target_id == poly_id and strip.id in observed:
            covered += strip.covered_area
    return min(1.0, covered / poly.area) if poly.area > 0 else 0.0


def revenue_for_strips(instance: Instance, observed: set[str]) -> float:
    """Coverage revenue of an observed strip set.

    Always accumulated in instance order, so one strip set maps to one
    bit-exact float no matter who asks (objective, search bound, oracle);
    the value is also float-monotone under set inclusion, which makes
    bound-vs-incumbent pruning at equality safe.
    """
    total = 0.0
    for strip in instance.strips:
        if strip.kind == "spot" and strip.id in observed:
            total += strip.weight
    for poly in instance.polygons:
        total += poly.weight * piecewise_profit(_polygon_coverage(instance, poly.id, observed))
    return total


def objective_value(instance: Instance, solution: Solution) -> float:
    """Coverage revenue of a solution (spot weights plus polygon payoffs)."""
    return revenue_for_strips(instance, solution.observed_strips())


def profit_percent(instance: Instance, solution: Solution) -> float:
    """Achieved share of the linear total profit, in percent."""
    observed = solution.observed_strips()
    achieved = 0.0
    available = 0.0
    for strip in instance.strips:
        if strip.kind == "spot":
            available += strip.weight
            if strip.id in observed:
                achieved += strip.weight
    for poly in instance.polygons:
        available += poly.weight
        achieved += poly.weight * _polygon_coverage(instance, poly.id, observed)
    if available <= 0.0:
        return 100.0
    return 100.0 * achieved / available


@dataclass(frozen=True)
class Violation:
    kind: str  # window | duration | duplicate | transition | order | unknown-reference
    satellite_id: str
    strip_id: str
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


def validate_schedule(instance: Instance, solution: Solution) -> ValidationReport:
    """Check window containment, duration bounds, uniqueness, order, and spacing."""
    report = ValidationReport()

    def flag(kind, sat_id, strip_id, message):
        report.violations.append(Violation(kind, sat_id, strip_id, message))

    seen_strips: dict[str, str] = {}
    for sat_id in sorted(solution.observations):
        sequence = solution.observations[sat_id]
        if sat_id not in instance.sat_by_id and sequence:
            flag("unknown-reference", sat_id, "", f"unknown satellite {sat_id}")
            continue
        prev = None
        prev_idx = None
        for obs in sequence:
            idx = instance.vtw_index.get(obs.vtw_key)
            if idx is None:
                flag("unknown-reference", sat_id, obs.strip_id, f"no window {obs.vtw_key} in instance")
                prev, prev_idx = obs, None
                continue
            window = instance.vtws[idx]
            if obs.start < window.vws - TIME_EPS or obs.end > window.vwe + TIME_EPS:
                flag(
                    "window",
                    sat_id,
                    obs.strip_id,
                    f"[{obs.start:.3f}, {obs.end:.3f}] outside window [{window.vws:.0f}, {window.vwe:.0f}]",
                )
            if not window.p_lower - TIME_EPS <= obs.duration <= window.p_upper + TIME_EPS:
                flag(
                    "duration",
                    sat_id,
                    obs.strip_id,
                    f"duration {obs.duration:.3f} outside [{window.p_lower:.3f}, {window.p_upper:.3f}]",
                )
            if obs.strip_id in seen_strips:
                flag(
                    "duplicate",
                    sat_id,
                    obs.strip_id,
                    f"strip already observed by {seen_strips[obs.strip_id]}",
                )
            else:
                seen_strips[obs.strip_id] = sat_id
            if prev is not None:
                if obs.start < prev.start - TIME_EPS:
                    flag("order", sat_id, obs.strip_id, "stated order disagrees with start times")
                if prev_idx is not None:
                    delta = instance.transition_seconds(prev_idx, idx)
                    if obs.start < prev.end + delta - TIME_EPS:
                        flag(
                            "transition",
                            sat_id,
                            obs.strip_id,
                            f"gap {obs.start - prev.end:.3f} below setup time {delta:.3f}",
                        )
            prev, prev_idx = obs, idx
    return report


# ---------------------------------------------------------------------------
# canonical JSON


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError("non-finite float in document")
    if x == 0.0:
        x = 0.0  # normalize -0.0
    return format(x, ".17g")


def _write_canonical(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_fmt_float(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(",")
            out.append(json.dumps(key, ensure_ascii=True))
            out.append(":")
            _write_canonical(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _write_canonical(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


def dumps_canonical(obj) -> str:
    out: list[str] = []
    _write_canonical(obj, out)
    out.append("\n")
    return "".join(out)


def _expect(container, key, path: str, types=None):
    if isinstance(container, dict):
        if key not in container:
            raise InstanceFormatError(f"{path}.{key}: missing")
        value = container[key]
        where = f"{path}.{key}"
    else:
        raise InstanceFormatError(f"{path}: expected an object")
    if types is not None and not isinstance(value, types):
        raise InstanceFormatError(f"{where}: expected {types}, got {type(value).__name__}")
    return value


def _number(container, key, path: str) -> float:
    value = _expect(container, key, path, (int, float))
    if isinstance(value, bool):
        raise InstanceFormatError(f"{path}.{key}: expected a number")
    return float(value)


def _geo(entry, path: str) -> GeoPoint:
    if not (isinstance(entry, list) and len(entry) == 2):
        raise InstanceFormatError(f"{path}: expected [latitude, longitude]")
    return GeoPoint(float(entry[0]), float(entry[1]))


def _epoch_str(epoch: datetime) -> str:
    return epoch.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _parse_epoch(text: str, path: str) -> datetime:
    try:
        return datetime.strptime(text, "%Y-%m-%dT%H:%M:%SZ").replace(tzinfo=timezone.utc)
    except ValueError as exc:
        raise InstanceFormatError(f"{path}: bad epoch {text!r}") from exc


def serialize_instance(instance: Instance) -> str:
    """Canonical JSON text of an instance (schema saeos-instance/1)."""
    doc = {
        "schema": INSTANCE_SCHEMA,
        "epoch": _epoch_str(instance.epoch),
        "horizon": instance.horizon,
        "satellites": [
            {
                "id": s.id,
                "semi_major_axis": s.elements.semi_major_axis,
                "eccentricity": s.elements.eccentricity,
                "inclination": s.elements.inclination,
                "raan": s.elements.raan,
                "arg_perigee": s.elements.arg_perigee,
                "mean_anomaly_epoch": s.elements.mean_anomaly_epoch,
                "max_maneuver_angle": s.max_maneuver_angle,
                "roll_rate": s.roll_rate,
                "pitch_rate": s.pitch_rate,
                "yaw_rate": s.yaw_rate,
                "fov": s.fov,
                "settling_time": s.settling_time,
            }
            for s in instance.satellites
        ],
        "spots": [
            {"id": t.id, "latitude": t.location.latitude, "longitude": t.location.longitude, "weight": t.weight}
            for t in instance.spots
        ],
        "polygons": [
            {
                "id": p.id,
                "vertices": [[v.latitude, v.longitude] for v in p.vertices],
                "weight": p.weight,
                "area": p.area,
                "weight_factor": p.weight_factor,
            }
            for p in instance.polygons
        ],
        "strips": [
            {
                "id": s.id,
                "target_id": s.target_id,
                "kind": s.kind,
                "endpoint_a": [s.endpoint_a.latitude, s.endpoint_a.longitude],
                "endpoint_b": [s.endpoint_b.latitude, s.endpoint_b.longitude],
                "orientation": s.orientation,
                "weight": s.weight,
                "covered_area": s.covered_area,
            }
            for s in instance.strips
        ],
        "vtws": [
            {
                "satellite_id": w.satellite_id,
                "strip_id": w.strip_id,
                "orbit": w.orbit,
                "sense": w.sense,
                "vws": w.vws,
                "vwe": w.vwe,
                "p_lower": w.p_lower,
                "p_upper": w.p_upper,
                "attitude_sp1": list(w.attitude_sp1.as_tuple()),
                "attitude_sp2": list(w.attitude_sp2.as_tuple()),
                "ref_time_sp1": w.ref_time_sp1,
                "ref_time_sp2": w.ref_time_sp2,
            }
            for w in instance.vtws
        ],
        # values are an exact function of the stored window attitudes, so the
        # file registers each satellite's window set instead of an O(n^2) matrix
        "transitions": {
            sat.id: {"windows": instance.sat_vtws.get(sat.id, [])} for sat in instance.satellites
        },
    }
    return dumps_canonical(doc)


def deserialize_instance(text: str) -> Instance:
    """Parse canonical instance JSON; raises :class:`InstanceFormatError`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"$: not valid JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(doc, dict):
        raise InstanceFormatError("$: expected a top-level object")
    schema = _expect(doc, "schema", "$", str)
    if schema != INSTANCE_SCHEMA:
        raise InstanceFormatError(f"$.schema: unknown schema {schema!r}")
    epoch = _parse_epoch(_expect(doc, "epoch", "$", str), "$.epoch")
    horizon = _number(doc, "horizon", "$")

    satellites = []
    for i, entry in enumerate(_expect(doc, "satellites", "$", list)):
        path = f"$.satellites[{i}]"
        elements = OrbitalElements(
            semi_major_axis=_number(entry, "semi_major_axis", path),
            eccentricity=_number(entry, "eccentricity", path),
            inclination=_number(entry, "inclination", path),
            raan=_number(entry, "raan", path),
            arg_perigee=_number(entry, "arg_perigee", path),
            mean_anomaly_epoch=_number(entry, "mean_anomaly_epoch", path),
            epoch=epoch,
        )
        satellites.append(
            SatelliteSpec(
                id=_expect(entry, "id", path, str),
                elements=elements,
                max_maneuver_angle=_number(entry, "max_maneuver_angle", path),
                roll_rate=_number(entry, "roll_rate", path),
                pitch_rate=_number(entry, "pitch_rate", path),
                yaw_rate=_number(entry, "yaw_rate", path),
                fov=_number(entry, "fov", path),
                settling_time=_number(entry, "settling_time", path),
            )
        )

    spots = []
    for i, entry in enumerate(_expect(doc, "spots", "$", list)):
        path = f"$.spots[{i}]"
        spots.append(
            SpotTarget(
                id=_expect(entry, "id", path, str),
                location=GeoPoint(_number(entry, "latitude", path), _number(entry, "longitude", path)),
                weight=int(_number(entry, "weight", path)),
            )
        )

    polygons = []
    for i, entry in enumerate(_expect(doc, "polygons", "$", list)):
        path = f"$.polygons[{i}]"
        vertices = tuple(_geo(v, f"{path}.vertices[{j}]") for j, v in enumerate(_expect(entry, "vertices", path, list)))
        polygons.append(
            PolygonTarget(
                id=_expect(entry, "id", path, str),
                vertices=vertices,
                weight=_number(entry, "weight", path),
                area=_number(entry, "area", path),
                weight_factor=int(_number(entry, "weight_factor", path)),
            )
        )

    strips = []
    for i, entry in enumerate(_expect(doc, "strips", "$", list)):
        path = f"$.strips[{i}]"
        weight = entry.get("weight") if isinstance(entry, dict) else None
        covered = entry.get("covered_area") if isinstance(entry, dict) else None
        strips.append(
            Strip(
                id=_expect(entry, "id", path, str),
                target_id=_expect(entry, "target_id", path, str),
                kind=_expect(entry, "kind", path, str),
                endpoint_a=_geo(_expect(entry, "endpoint_a", path, list), f"{path}.endpoint_a"),
                endpoint_b=_geo(_expect(entry, "endpoint_b", path, list), f"{path}.endpoint_b"),
                orientation=_number(entry, "orientation", path),
                weight=None if weight is None else float(weight),
                covered_area=None if covered is None else float(covered),
            )
        )

    vtws = []
    for i, entry in enumerate(_expect(doc, "vtws", "$", list)):
        path = f"$.vtws[{i}]"
        att1 = _expect(entry, "attitude_sp1", path, list)
        att2 = _expect(entry, "attitude_sp2", path, list)
        if len(att1) != 3 or len(att2) != 3:
            raise InstanceFormatError(f"{path}: attitudes must be [roll, pitch, yaw]")
        vtws.append(
            VisibleTimeWindow(
                satellite_id=_expect(entry, "satellite_id", path, str),
                strip_id=_expect(entry, "strip_id", path, str),
                orbit=int(_number(entry, "orbit", path)),
                sense=int(_number(entry, "sense", path)),
                vws=_number(entry, "vws", path),
                vwe=_number(entry, "vwe", path),
                p_lower=_number(entry, "p_lower", path),
                p_upper=_number(entry, "p_upper", path),
                attitude_sp1=AttitudeAngles(*(float(v) for v in att1)),
                attitude_sp2=AttitudeAngles(*(float(v) for v in att2)),
                ref_time_sp1=_number(entry, "ref_time_sp1", path),
                ref_time_sp2=_number(entry, "ref_time_sp2", path),
            )
        )
    vtws = _sorted_vtws(vtws)

    transitions_doc = _expect(doc, "transitions", "$", dict)
    sat_vtws: dict[str, list[int]] = {s.id: [] for s in satellites}
    for i, w in enumerate(vtws):
        sat_vtws.setdefault(w.satellite_id, []).append(i)
    for sat in satellites:
        path = f"$.transitions.{sat.id}"
        if sat.id not in transitions_doc:
            raise InstanceFormatError(f"{path}: missing transition entry")
        windows = _expect(transitions_doc[sat.id], "windows", path, list)
        if [int(x) for x in windows] != sat_vtws[sat.id]:
            raise InstanceFormatError(f"{path}.windows: does not match this satellite's window set")

    instance = Instance(
        satellites=satellites,
        spots=spots,
        polygons=polygons,
        strips=strips,
        vtws=vtws,
        transition=build_transition_table(satellites, vtws),
        horizon=horizon,
        epoch=epoch,
    )
    validate_instance(instance)
    return instance


def serialize_solution(solution: Solution) -> str:
    """Canonical JSON text of a solution (schema saeos-solution/1).

    Wall-clock solve time is run metadata, not part of the artifact: the
    file must be byte-identical across repeated runs with the same seed.
    """
    doc = {
        "schema": SOLUTION_SCHEMA,
        "status": solution.status,
        "objective": solution.objective,
        "profit_percent": solution.profit_percent,
        "makespan": solution.makespan,
        "upper_bound": solution.upper_bound,
        "gap_percent": solution.gap_percent,
        "makespan_gap_percent": solution.makespan_gap_percent,
        "nodes_explored": solution.nodes_explored,
        "observations": {
            sat_id: [
                {
                    "strip_id": o.strip_id,
                    "orbit": o.orbit,
                    "sense": o.sense,
                    "start": o.start,
                    "duration": o.duration,
                    "end": o.end,
                }
                for o in obs
            ]
            for sat_id, obs in solution.observations.items()
        },
    }
    return dumps_canonical(doc)


def deserialize_solution(text: str) -> Solution:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"$: not valid JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(doc, dict):
        raise InstanceFormatError("$: expected a top-level object")
    schema = _expect(doc, "schema", "$", str)
    if schema != SOLUTION_SCHEMA:
        raise InstanceFormatError(f"$.schema: unknown schema {schema!r}")
    observations = {}
    obs_doc = _expect(doc, "observations", "$", dict)
    for sat_id in sorted(obs_doc):
        entries = obs_doc[sat_id]
        path = f"$.observations.{sat_id}"
        if not isinstance(entries, list):
            raise InstanceFormatError(f"{path}: expected a list")
        observations[sat_id] = [
            ScheduledObservation(
                satellite_id=sat_id,
                strip_id=_expect(entry, "strip_id", f"{path}[{i}]", str),
                orbit=int(_number(entry, "orbit", f"{path}[{i}]")),
                sense=int(_number(entry, "sense", f"{path}[{i}]")),
                start=_number(entry, "start", f"{path}[{i}]"),
                duration=_number(entry, "duration", f"{path}[{i}]"),
            )
            for i, entry in enumerate(entries)
        ]
    makespan = doc.get("makespan")
    makespan_gap = doc.get("makespan_gap_percent")
    return Solution(
        observations=observations,
        objective=_number(doc, "objective", "$"),
        profit_percent=_number(doc, "profit_percent", "$"),
        makespan=None if makespan is None else float(makespan),
        upper_bound=_number(doc, "upper_bound", "$"),
        gap_percent=_number(doc, "gap_percent", "$"),
        status=_expect(doc, "status", "$", str),
        solve_time=0.0,
        makespan_gap_percent=None if makespan_gap is None else float(makespan_gap),
        nodes_explored=int(doc.get("nodes_explored", 0)),
    )
