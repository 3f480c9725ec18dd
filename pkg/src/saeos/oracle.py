"""Exhaustive reference solver for tiny instances.

Enumerates every assignment of each strip to one of its windows (or to
rejection) and, per assignment, every combination of per-satellite
observation orders, timing each with the same earliest-completion forward
pass the main solver uses. Ground truth for solver equivalence tests;
refuses instances over the size guard rather than approximating.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import permutations, product

from .model import (
    STATUS_OPTIMAL,
    Instance,
    Solution,
    compute_makespan,
    gap_percent,
    profit_percent,
    revenue_for_strips,
    validate_instance,
)
from .solver import _Problem

GUARD_MAX_STRIPS = 6
GUARD_MAX_VTWS = 12


class OracleSizeError(ValueError):
    """Instance exceeds the exhaustive-enumeration guard."""


@dataclass
class OracleStats:
    assignments_enumerated: int = 0
    sequencings_enumerated: int = 0


def brute_force_solve(instance: Instance, with_stats: bool = False):
    """Provably optimal solution by full enumeration (guarded by size)."""
    validate_instance(instance)
    if len(instance.strips) > GUARD_MAX_STRIPS or len(instance.vtws) > GUARD_MAX_VTWS:
        raise OracleSizeError(
            f"instance has {len(instance.strips)} strips / {len(instance.vtws)} windows, "
            f"guard allows {GUARD_MAX_STRIPS} / {GUARD_MAX_VTWS}"
        )
    t0 = time.perf_counter()
    problem = _Problem(instance)
    stats = OracleStats()

    strip_ids = [s.id for s in instance.strips]
    options = [[None] + problem.windows_of_strip[sid] for sid in strip_ids]
    sat_ids = sorted(instance.sat_by_id)

    best_obj = -1.0
    best_sequences: dict[str, tuple[int, ...]] | None = None

    for assignment in product(*options):
        stats.assignments_enumerated += 1
        chosen = {sat: [] for sat in sat_ids}
        observed = set()
        for sid, window in zip(strip_ids, assignment):
            if window is not None:
                chosen[problem.sat_of[window]].append(window)
                observed.add(sid)
        revenue = revenue_for_strips(instance, observed)
        for orders in product(*(permutations(chosen[sat]) for sat in sat_ids)):
            stats.sequencings_enumerated += 1
            if all(problem.forward_pass(seq) is not None for seq in orders):
                # first feasible order of the first assignment reaching this
                # revenue wins: enumeration order is canonical, so ties are
                # broken by the lowest (satellite, strip, orbit, sense) choice
                if revenue > best_obj:
                    best_obj = revenue
                    best_sequences = dict(zip(sat_ids, orders))

    observations = {}
    for sat_id in sat_ids:
        seq = best_sequences.get(sat_id, ()) if best_sequences else ()
        observations[sat_id] = problem.timings(seq) or []
    solution = Solution(
        observations=observations,
        objective=max(best_obj, 0.0),
        profit_percent=0.0,
        makespan=None,
        upper_bound=max(best_obj, 0.0),
        gap_percent=0.0,
        status=STATUS_OPTIMAL,
        solve_time=time.perf_counter() - t0,
    )
    solution.profit_percent = profit_percent(instance, solution)
    solution.makespan = compute_makespan(solution)
    solution.gap_percent = gap_percent(solution.objective, solution.upper_bound)
    if with_stats:
        return solution, stats
    return solution


def enumerate_feasible_schedules(instance: Instance):
    """Yield (observed strip set, revenue, makespan) for every feasible schedule.

    Exhaustive over assignments and per-satellite orders with forward-pass
    timing; used to cross-check lexicographic optimality on tiny instances.
    """
    validate_instance(instance)
    if len(instance.strips) > GUARD_MAX_STRIPS or len(instance.vtws) > GUARD_MAX_VTWS:
        raise OracleSizeError("instance exceeds the enumeration guard")
    problem = _Problem(instance)
    strip_ids = [s.id for s in instance.strips]
    options = [[None] + problem.windows_of_strip[sid] for sid in strip_ids]
    sat_ids = sorted(instance.sat_by_id)
    for assignment in product(*options):
        chosen = {sat: [] for sat in sat_ids}
        observed = set()
        for sid, window in zip(strip_ids, assignment):
            if window is not None:
                chosen[problem.sat_of[window]].append(window)
                observed.add(sid)
        revenue = revenue_for_strips(instance, observed)
        for orders in product(*(permutations(chosen[sat]) for sat in sat_ids)):
            ends = [problem.forward_pass(seq) for seq in orders]
            if any(e is None for e in ends):
                continue
            makespan = max((e[-1] for e in ends if e), default=0.0)
            yield frozenset(observed), revenue, makespan
