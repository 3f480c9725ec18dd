"""Figure rendering for solve and benchmark reports.

All renderers write PNG files next to the delimited output and never open
interactive windows (Agg backend).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .model import Instance, Solution
from .report import ReportRow

KIND_COLORS = {"spot": "tab:blue", "polygon": "tab:orange"}


def schedule_timeline(instance: Instance, solution: Solution, path) -> None:
    """Per-satellite observation timeline; bar color marks the target kind."""
    sat_ids = sorted(instance.sat_by_id)
    fig, ax = plt.subplots(figsize=(10, 0.6 * max(4, len(sat_ids)) + 1.5))
    for lane, sat_id in enumerate(sat_ids):
        for obs in solution.observations.get(sat_id, []):
            kind = instance.strip_by_id[obs.strip_id].kind
            ax.barh(
                lane,
                width=max(obs.duration, 30.0) / 3600.0,  # keep short bars visible
                left=obs.start / 3600.0,
                height=0.6,
                color=KIND_COLORS[kind],
                edgecolor="none",
            )
    ax.set_yticks(range(len(sat_ids)), sat_ids)
    ax.set_xlabel("hours since epoch")
    ax.set_xlim(0.0, instance.horizon / 3600.0)
    count = len(solution.all_observations())
    ax.set_title(f"{count} observations, profit {solution.profit_percent:.1f}%, status {solution.status}")
    handles = [plt.Rectangle((0, 0), 1, 1, color=c) for c in KIND_COLORS.values()]
    ax.legend(handles, KIND_COLORS.keys(), loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def instance_map(instance: Instance, path, solution: Solution | None = None) -> None:
    """Targets and strip centerlines in the generation region."""
    fig, ax = plt.subplots(figsize=(7, 7))
    for poly in instance.polygons:
        lats = [v.latitude for v in poly.vertices] + [poly.vertices[0].latitude]
        lons = [v.longitude for v in poly.vertices] + [poly.vertices[0].longitude]
        ax.plot(lons, lats, color="tab:orange", linewidth=1.2)
    observed = solution.observed_strips() if solution else set()
    for strip in instance.strips:
        color = "tab:green" if strip.id in observed else "0.7"
        ax.plot(
            [strip.endpoint_a.longitude, strip.endpoint_b.longitude],
            [strip.endpoint_a.latitude, strip.endpoint_b.latitude],
            color=color,
            linewidth=0.8,
        )
    if instance.spots:
        ax.scatter(
            [t.location.longitude for t in instance.spots],
            [t.location.latitude for t in instance.spots],
            s=12,
            color="tab:blue",
            zorder=3,
        )
    ax.set_xlabel("longitude (deg)")
    ax.set_ylabel("latitude (deg)")
    ax.set_title("targets and strips" + (" (observed in green)" if solution else ""))
    ax.set_aspect(1.0 / np.cos(np.radians(-70.0)))
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def benchmark_overview(rows: list[ReportRow], path) -> None:
    """Profit and solve-time bars across a benchmark batch."""
    clean = [r for r in rows if r.error is None]
    if not clean:
        return
    labels = [r.instance_id for r in clean]
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(max(6, 0.45 * len(clean)), 6), sharex=True)
    top.bar(labels, [r.tot_prof_percent for r in clean], color="tab:blue")
    top.set_ylabel("TotProf (%)")
    top.set_ylim(0, 105)
    bottom.bar(labels, [max(r.time_seconds, 1e-3) for r in clean], color="tab:orange")
    bottom.set_ylabel("solve time (s)")
    bottom.set_yscale("log")
    bottom.tick_params(axis="x", rotation=60)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
