"""Benchmark report rows: per-instance counts, profit, makespan, gap, time.

Column layout mirrors the benchmark tables: target/strip/window counts,
activity ratios in slash notation, achieved profit percentage, makespan as
a zero-padded clock offset from the scheduling epoch, bound gap, and wall
time. The column order is frozen; downstream tooling golden-tests it.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .model import Instance, Solution

REPORT_COLUMNS = [
    "Ins.",
    "CtSpot",
    "CtPoly",
    "CtStr",
    "CtVtw",
    "CtStrVtw",
    "CtAcSat",
    "CtAcOrb",
    "CtObSpot",
    "CtObPoly",
    "CtObStr",
    "TotProf(%)",
    "Makespan",
    "Gap(%)",
    "Time(s)",
]


@dataclass
class ReportRow:
    instance_id: str
    ct_spot: int
    ct_poly: int
    ct_str: int
    ct_vtw: int
    ct_str_vtw: int
    ct_ac_sat: str
    ct_ac_orb: str
    ct_ob_spot: str
    ct_ob_poly: str
    ct_ob_str: str
    tot_prof_percent: float
    makespan_seconds: int | None  # nearest whole second; None for empty schedules
    gap_text: str
    time_seconds: float
    error: str | None = None

    def cells(self) -> list[str]:
        if self.error is not None:
            return [self.instance_id] + ["-"] * 12 + [f"error: {self.error}"] + ["-"]
        return [
            self.instance_id,
            str(self.ct_spot),
            str(self.ct_poly),
            str(self.ct_str),
            str(self.ct_vtw),
            str(self.ct_str_vtw),
            self.ct_ac_sat,
            self.ct_ac_orb,
            self.ct_ob_spot,
            self.ct_ob_poly,
            self.ct_ob_str,
            f"{self.tot_prof_percent:.1f}",
            makespan_hms(self.makespan_seconds),
            self.gap_text,
            f"{self.time_seconds:.2f}",
        ]


def makespan_hms(seconds: int | None) -> str:
    """Zero-padded HH:MM:SS offset; hours may exceed 24. '-' when empty."""
    if seconds is None:
        return "-"
    if seconds < 0:
        raise ValueError("makespan cannot be negative")
    hours, rest = divmod(int(seconds), 3600)
    minutes, secs = divmod(rest, 60)
    return f"{hours:02d}:{minutes:02d}:{secs:02d}"


def parse_hms(text: str) -> int | None:
    if text == "-":
        return None
    hours, minutes, seconds = text.split(":")
    return int(hours) * 3600 + int(minutes) * 60 + int(seconds)


def _ratio(active: int, total: int) -> str:
    return f"{active}/{total}"


def build_report_row(instance_id: str, instance: Instance, solution: Solution) -> ReportRow:
    observed = solution.observed_strips()
    observed_targets = {instance.strip_by_id[s].target_id for s in observed}

    active_sats = sum(1 for obs in solution.observations.values() if obs)
    orbits_with_windows = {w.orbit for w in instance.vtws}
    orbits_active = {o.orbit for o in solution.all_observations()}

    spot_strip_count = sum(1 for s in instance.strips if s.kind == "spot")
    observed_spots = sum(1 for t in instance.spots if t.id in observed_targets)
    observed_polys = sum(1 for p in instance.polygons if p.id in observed_targets)

    if solution.makespan_gap_percent is not None:
        gap_text = f"({solution.gap_percent:.1f}, {solution.makespan_gap_percent:.1f})"
    else:
        gap_text = f"{solution.gap_percent:.1f}"

    return ReportRow(
        instance_id=instance_id,
        ct_spot=len(instance.spots),
        ct_poly=len(instance.polygons),
        ct_str=len(instance.strips),
        ct_vtw=len(instance.vtws),
        ct_str_vtw=sum(1 for s in instance.strips if instance.vtws_by_strip.get(s.id)),
        ct_ac_sat=_ratio(active_sats, len(instance.satellites)),
        ct_ac_orb=_ratio(len(orbits_active), len(orbits_with_windows)),
        ct_ob_spot=_ratio(observed_spots, len(instance.spots)),
        ct_ob_poly=_ratio(observed_polys, len(instance.polygons)),
        ct_ob_str=_ratio(len(observed), len(instance.strips)),
        tot_prof_percent=solution.profit_percent,
        makespan_seconds=None if solution.makespan is None else round(solution.makespan),
        gap_text=gap_text,
        time_seconds=solution.solve_time,
        error=None,
    )


def error_row(instance_id: str, message: str) -> ReportRow:
    return ReportRow(
        instance_id=instance_id,
        ct_spot=0,
        ct_poly=0,
        ct_str=0,
        ct_vtw=0,
        ct_str_vtw=0,
        ct_ac_sat="-",
        ct_ac_orb="-",
        ct_ob_spot="-",
        ct_ob_poly="-",
        ct_ob_str="-",
        tot_prof_percent=0.0,
        makespan_seconds=None,
        gap_text="-",
        time_seconds=0.0,
        error=message,
    )


def rows_to_csv(rows: list[ReportRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for row in rows:
        writer.writerow(row.cells())
    return buf.getvalue()


@dataclass
class GroupSummary:
    group: str
    count: int
    mean_strips: float
    mean_windows: float
    mean_pair_relations: float  # ordered same-satellite window pairs
    mean_tot_prof: float
    mean_profit_gap: float
    mean_time: float


def _profit_gap_value(gap_text: str) -> float:
    text = gap_text.strip()
    if text.startswith("("):
        text = text.strip("()").split(",")[0]
    return float(text)


def summarize_groups(rows: list[ReportRow], pair_relations: dict[str, int] | None = None) -> list[GroupSummary]:
    """Per-letter means over the clean rows, plus model-size telemetry."""
    groups: dict[str, list[ReportRow]] = {}
    for row in rows:
        if row.error is not None:
            continue
        groups.setdefault(row.instance_id.split("-")[0], []).append(row)
    summaries = []
    for letter in sorted(groups):
        members = groups[letter]
        n = len(members)
        relations = 0.0
        if pair_relations:
            relations = sum(pair_relations.get(r.instance_id, 0) for r in members) / n
        summaries.append(
            GroupSummary(
                group=letter,
                count=n,
                mean_strips=sum(r.ct_str for r in members) / n,
                mean_windows=sum(r.ct_vtw for r in members) / n,
                mean_pair_relations=relations,
                mean_tot_prof=sum(r.tot_prof_percent for r in members) / n,
                mean_profit_gap=sum(_profit_gap_value(r.gap_text) for r in members) / n,
                mean_time=sum(r.time_seconds for r in members) / n,
            )
        )
    return summaries


def sequencing_relation_count(instance: Instance) -> int:
    """Ordered same-satellite window pairs, the scheduling-relation telemetry."""
    total = 0
    for indices in instance.sat_vtws.values():
        n = len(indices)
        total += n * (n - 1)
    return total


def summary_table(summaries: list[GroupSummary]) -> str:
    lines = ["group  n  mean_CtStr  mean_CtVtw  mean_pairs  mean_TotProf(%)  mean_Gap(%)  mean_Time(s)"]
    for s in summaries:
        lines.append(
            f"{s.group:>5}  {s.count:1d}  {s.mean_strips:10.1f}  {s.mean_windows:10.1f}  "
            f"{s.mean_pair_relations:10.1f}  {s.mean_tot_prof:15.1f}  {s.mean_profit_gap:11.2f}  {s.mean_time:12.2f}"
        )
    return "\n".join(lines) + "\n"
