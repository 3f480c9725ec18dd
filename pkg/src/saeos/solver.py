"""Exact branch-and-bound scheduler for observation selection and sequencing.

Search design:
  - Durations are fixed at each window's minimum imaging time. The
    objective only depends on which strips are present, shorter
    observations only enlarge the feasible set, and re-timing any feasible
    order at minimum durations stays feasible, so the restriction loses
    nothing for either objective mode.
  - Strips are decided in a static order of decreasing bound contribution.
    A decision either rejects the strip or places one of its windows at
    some position of the owning satellite's current sequence; every
    (assignment, per-satellite order) combination is reachable exactly
    once, and infeasible partial sequences prune soundly because setup
    times satisfy a triangle inequality through intermediate observations.
  - Node bounds are the canonical revenue of (accepted + still-undecided)
    strips, which is float-monotone under set inclusion: pruning at
    bound <= incumbent can never cut a strictly better leaf, and a warm
    start that meets the root bound proves optimality immediately.

The search runs on an explicit stack, so a time limit can stop it anywhere
and the surviving frontier still yields a valid global bound.
"""

from __future__ import annotations

import logging
import math
import time
from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

from .model import (
    STATUS_FEASIBLE,
    STATUS_INFEASIBLE_EMPTY,
    STATUS_OPTIMAL,
    Instance,
    ScheduledObservation,
    Solution,
    compute_makespan,
    gap_percent,
    profit_percent,
    revenue_for_strips,
    validate_instance,
)

logger = logging.getLogger(__name__)

PROFIT_PIN_TOL = 1e-9

TIME_CHECK_INTERVAL = 128  # forward passes between wall-clock checks inside one expansion


class SolverConfigError(ValueError):
    """Unusable solver configuration."""


class SolverInputError(ValueError):
    """Instance failed validation on entry."""


@dataclass
class SolverConfig:
    time_limit: float = 3600.0
    objective_mode: str = "single"  # "single" | "lexicographic"
    rng_seed: int = 0
    worker_count: int = 1  # advisory; this implementation is single-threaded
    log_level: str = "warning"

    def __post_init__(self) -> None:
        if self.time_limit <= 0:
            raise SolverConfigError(f"time limit must be positive, got {self.time_limit}")
        if self.objective_mode not in ("single", "lexicographic"):
            raise SolverConfigError(f"unknown objective mode {self.objective_mode!r}")


@dataclass
class SearchNode:
    """Partial decision state: per-satellite sequences plus decided strips."""

    sequences: dict[str, tuple[int, ...]]
    accepted: frozenset[str]
    rejected: frozenset[str]
    remaining: tuple[str, ...]
    bound: float = math.inf


class _Problem:
    """Flattened per-window arrays for fast forward passes."""

    def __init__(self, instance: Instance):
        self.instance = instance
        n = len(instance.vtws)
        self.sat_ids = [s.id for s in instance.satellites]
        self.vws = [0.0] * n
        self.p_low = [0.0] * n
        self.latest = [0.0] * n
        self.settle = [0.0] * n
        self.inv_roll = [0.0] * n
        self.inv_pitch = [0.0] * n
        self.inv_yaw = [0.0] * n
        self.a1 = [(0.0, 0.0, 0.0)] * n
        self.a2 = [(0.0, 0.0, 0.0)] * n
        self.sat_of = [""] * n
        self.strip_of = [""] * n
        for i, w in enumerate(instance.vtws):
            sat = instance.sat_by_id[w.satellite_id]
            self.vws[i] = w.vws
            self.p_low[i] = w.p_lower
            self.latest[i] = w.vwe - w.p_lower
            self.settle[i] = sat.settling_time
            self.inv_roll[i] = 1.0 / sat.roll_rate
            self.inv_pitch[i] = 1.0 / sat.pitch_rate
            self.inv_yaw[i] = 1.0 / sat.yaw_rate
            self.a1[i] = w.attitude_sp1.as_tuple()
            self.a2[i] = w.attitude_sp2.as_tuple()
            self.sat_of[i] = w.satellite_id
            self.strip_of[i] = w.strip_id
        # windows per strip in canonical order
        self.windows_of_strip = {s.id: list(instance.vtws_by_strip.get(s.id, [])) for s in instance.strips}

    def delta(self, u: int, v: int) -> float:
        """Setup time from window u to window v (same satellite)."""
        a2 = self.a2[u]
        a1 = self.a1[v]
        return self.settle[v] + max(
            abs(a1[0] - a2[0]) * self.inv_roll[v],
            abs(a1[1] - a2[1]) * self.inv_pitch[v],
            abs(a1[2] - a2[2]) * self.inv_yaw[v],
        )

    def forward_pass(self, seq) -> list[float] | None:
        """Earliest-completion end times for a window sequence, or None."""
        ends = []
        t_end = 0.0
        prev = -1
        for v in seq:
            if prev < 0:
                start = self.vws[v]
            else:
                start = t_end + self.delta(prev, v)
                if start < self.vws[v]:
                    start = self.vws[v]
            if start > self.latest[v]:
                return None
            t_end = start + self.p_low[v]
            ends.append(t_end)
            prev = v
        return ends

    def timings(self, seq) -> list[ScheduledObservation] | None:
        ends = self.forward_pass(seq)
        if ends is None:
            return None
        instance = self.instance
        return [
            ScheduledObservation(
                satellite_id=instance.vtws[v].satellite_id,
                strip_id=instance.vtws[v].strip_id,
                orbit=instance.vtws[v].orbit,
                sense=instance.vtws[v].sense,
                start=end - self.p_low[v],
                duration=self.p_low[v],
            )
            for v, end in zip(seq, ends)
        ]


def sequence_feasible(instance: Instance, satellite_id: str, vtw_refs) -> tuple[bool, list[ScheduledObservation]]:
    """Earliest-completion timing of an ordered window sequence.

    Each observation starts as soon as its window and the setup time from
    its predecessor allow, and runs for the window's minimum duration;
    the order is feasible when every observation still ends inside its
    window. Accepts window keys or global indices.
    """
    problem = _Problem(instance)
    seq = []
    for ref in vtw_refs:
        idx = instance.vtw_index[ref] if isinstance(ref, tuple) else int(ref)
        if instance.vtws[idx].satellite_id != satellite_id:
            raise SolverInputError(f"window {instance.vtws[idx].key} is not on satellite {satellite_id}")
        seq.append(idx)
    timings = problem.timings(seq)
    return (timings is not None), (timings or [])


def upper_bound(instance: Instance, node: SearchNode) -> float:
    """Admissible profit bound: decided value plus everything still achievable."""
    return revenue_for_strips(instance, set(node.accepted) | set(node.remaining))


def _strip_order(instance: Instance, windowed: list[str]) -> list[str]:
    """Undecided strips by decreasing bound contribution, ties by id."""
    full = set(windowed)
    base: dict[str, float] = {}
    for sid in windowed:
        base[sid] = revenue_for_strips(instance, full) - revenue_for_strips(instance, full - {sid})
    return sorted(windowed, key=lambda sid: (-base[sid], sid))


def _assemble(
    instance: Instance,
    problem: _Problem,
    sequences: dict[str, tuple[int, ...]],
    status: str,
    bound: float,
    solve_time: float,
    nodes: int,
) -> Solution:
    observations = {}
    for sat_id in sorted(instance.sat_by_id):
        timings = problem.timings(sequences.get(sat_id, ()))
        if timings is None:
            raise AssertionError("solver produced an infeasible sequence")
        observations[sat_id] = timings
    solution = Solution(
        observations=observations,
        objective=0.0,
        profit_percent=0.0,
        makespan=None,
        upper_bound=bound,
        gap_percent=0.0,
        status=status,
        solve_time=solve_time,
        nodes_explored=nodes,
    )
    solution.objective = revenue_for_strips(instance, solution.observed_strips())
    solution.profit_percent = profit_percent(instance, solution)
    solution.makespan = compute_makespan(solution)
    solution.gap_percent = gap_percent(solution.objective, solution.upper_bound)
    return solution


def greedy_construct(instance: Instance, rng: np.random.Generator | None = None) -> Solution:
    """Fast feasible warm start: marginal-profit-ordered cheapest insertion.

    The rng parameter is accepted for interface stability; construction is
    deterministic.
    """
    validate_instance(instance)
    problem = _Problem(instance)
    t0 = time.perf_counter()
    sequences: dict[str, list[int]] = {sid: [] for sid in problem.sat_ids}
    starts: dict[str, list[float]] = {sid: [] for sid in problem.sat_ids}
    last_end: dict[str, float] = {sid: 0.0 for sid in problem.sat_ids}
    scheduled: set[str] = set()
    remaining = sorted(sid for sid, wins in problem.windows_of_strip.items() if wins)

    while remaining:
        base = revenue_for_strips(instance, scheduled)
        best_sid = None
        best_gain = -1.0
        for sid in remaining:
            gain = revenue_for_strips(instance, scheduled | {sid}) - base
            if gain > best_gain + 1e-15:
                best_gain = gain
                best_sid = sid
        remaining.remove(best_sid)

        best_slot = None  # ((delay, sat, window, pos), candidate, ends)
        for v in problem.windows_of_strip[best_sid]:
            sat_id = problem.sat_of[v]
            seq = sequences[sat_id]
            anchor = bisect_left(starts[sat_id], problem.vws[v])
            for pos in sorted({max(0, anchor - 1), anchor, min(len(seq), anchor + 1)}):
                candidate = seq[:pos] + [v] + seq[pos:]
                ends = problem.forward_pass(candidate)
                if ends is None:
                    continue
                key = (ends[-1] - last_end[sat_id], sat_id, v, pos)
                if best_slot is None or key < best_slot[0]:
                    best_slot = (key, candidate, ends)
        if best_slot is None:
            continue
        (_, sat_id, _, _), candidate, ends = best_slot
        sequences[sat_id] = candidate
        starts[sat_id] = [e - problem.p_low[w] for w, e in zip(candidate, ends)]
        last_end[sat_id] = ends[-1]
        scheduled.add(best_sid)

    windowed = [sid for sid, wins in problem.windows_of_strip.items() if wins]
    root_bound = revenue_for_strips(instance, set(windowed))
    return _assemble(
        instance,
        problem,
        {sid: tuple(seq) for sid, seq in sequences.items()},
        STATUS_FEASIBLE,
        root_bound,
        time.perf_counter() - t0,
        0,
    )


@dataclass
class _SearchOutcome:
    sequences: dict[str, tuple[int, ...]]
    objective: float
    proven: bool
    open_bound: float  # best bound among unexplored nodes (maximization)
    nodes: int


def _search_max_profit(
    instance: Instance,
    problem: _Problem,
    order: list[str],
    incumbent_sequences: dict[str, tuple[int, ...]],
    deadline: float,
) -> _SearchOutcome:
    """DFS over (reject | window x position) decisions, maximizing revenue."""
    incumbent_set = {problem.strip_of[v] for seq in incumbent_sequences.values() for v in seq}
    incumbent_obj = revenue_for_strips(instance, incumbent_set)
    best_sequences = dict(incumbent_sequences)

    root_remaining = tuple(order)
    root_bound = revenue_for_strips(instance, set(root_remaining))
    nodes = 0
    # stack entries: (depth, sequences, accepted frozenset, bound)
    stack = [(0, {sid: () for sid in problem.sat_ids}, frozenset(), root_bound)]

    def timed_out_result(extra_bound: float) -> _SearchOutcome:
        open_bound = max((entry[3] for entry in stack), default=incumbent_obj)
        open_bound = max(open_bound, extra_bound, incumbent_obj)
        return _SearchOutcome(best_sequences, incumbent_obj, False, open_bound, nodes)

    while stack:
        if time.perf_counter() > deadline:
            return timed_out_result(incumbent_obj)
        depth, sequences, accepted, bound = stack.pop()
        if bound <= incumbent_obj:
            continue
        nodes += 1
        if depth == len(order):
            # leaf: bound is the exact revenue of the accepted set
            incumbent_obj = bound
            best_sequences = sequences
            continue
        sid = order[depth]
        remaining_after = order[depth + 1 :]

        children = []
        reject_bound = revenue_for_strips(instance, set(accepted) | set(remaining_after))
        if reject_bound > incumbent_obj:
            children.append((depth + 1, sequences, accepted, reject_bound))
        accepted_child = accepted | {sid}
        passes = 0
        for v in problem.windows_of_strip[sid]:
            sat_id = problem.sat_of[v]
            seq = sequences[sat_id]
            for pos in range(len(seq) + 1):
                passes += 1
                if passes % TIME_CHECK_INTERVAL == 0 and time.perf_counter() > deadline:
                    return timed_out_result(bound)  # node stays open
                candidate = seq[:pos] + (v,) + seq[pos:]
                if problem.forward_pass(candidate) is None:
                    continue
                child_sequences = dict(sequences)
                child_sequences[sat_id] = candidate
                children.append((depth + 1, child_sequences, accepted_child, bound))
        # canonical-first exploration: later pushes pop first
        for child in reversed(children):
            stack.append(child)

    return _SearchOutcome(best_sequences, incumbent_obj, True, incumbent_obj, nodes)


def _required_strip_makespan_lb(instance: Instance, problem: _Problem, order: list[str], pinned: float) -> float:
    """Makespan floor from strips no pinned-profit schedule can drop.

    A strip whose rejection alone pushes the profit bound below the pin
    must appear in every candidate schedule, so the schedule cannot finish
    before that strip's earliest possible completion.
    """
    full = set(order)
    lb = 0.0
    for sid in order:
        if revenue_for_strips(instance, full - {sid}) < pinned - PROFIT_PIN_TOL:
            earliest = min(problem.vws[v] + problem.p_low[v] for v in problem.windows_of_strip[sid])
            lb = max(lb, earliest)
    return lb


def _greedy_min_makespan(instance: Instance, problem: _Problem, order: list[str]) -> dict[str, tuple[int, ...]]:
    """Earliest-completion-ordered insertion; phase-2 warm start."""
    sequences: dict[str, list[int]] = {sid: [] for sid in problem.sat_ids}
    starts: dict[str, list[float]] = {sid: [] for sid in problem.sat_ids}

    def earliest_end(sid: str) -> float:
        return min(problem.vws[v] + problem.p_low[v] for v in problem.windows_of_strip[sid])

    current_mk = 0.0
    for sid in sorted(order, key=lambda s: (earliest_end(s), s)):
        best = None  # ((new makespan, sat, window, pos), candidate, ends)
        for v in problem.windows_of_strip[sid]:
            sat_id = problem.sat_of[v]
            seq = sequences[sat_id]
            anchor = bisect_left(starts[sat_id], problem.vws[v])
            for pos in sorted({max(0, anchor - 1), anchor, min(len(seq), anchor + 1)}):
                candidate = seq[:pos] + [v] + seq[pos:]
                ends = problem.forward_pass(candidate)
                if ends is None:
                    continue
                key = (max(current_mk, ends[-1]), sat_id, v, pos)
                if best is None or key < best[0]:
                    best = (key, candidate, ends)
        if best is None:
            continue
        (new_mk, sat_id, _, _), candidate, ends = best
        sequences[sat_id] = candidate
        starts[sat_id] = [e - problem.p_low[w] for w, e in zip(candidate, ends)]
        current_mk = new_mk
    return {sid: tuple(seq) for sid, seq in sequences.items()}


def _search_min_makespan(
    instance: Instance,
    problem: _Problem,
    order: list[str],
    pinned_profit: float,
    incumbent_sequences: dict[str, tuple[int, ...]],
    deadline: float,
) -> _SearchOutcome:
    """Phase-2 DFS: minimize the latest completion among profit-pinned schedules."""

    def seq_makespan(sequences) -> float:
        total = 0.0
        for seq in sequences.values():
            if seq:
                ends = problem.forward_pass(seq)
                total = max(total, ends[-1])
        return total

    incumbent_mk = seq_makespan(incumbent_sequences)
    best_sequences = dict(incumbent_sequences)
    nodes = 0
    root_bound = revenue_for_strips(instance, set(order))
    floor_lb = _required_strip_makespan_lb(instance, problem, order, pinned_profit)
    if floor_lb >= incumbent_mk:  # the warm schedule is already at the floor
        return _SearchOutcome(best_sequences, incumbent_mk, True, incumbent_mk, 0)
    # stack entries: (depth, sequences, accepted, profit_bound, makespan_lb)
    stack = [(0, {sid: () for sid in problem.sat_ids}, frozenset(), root_bound, floor_lb)]

    def timed_out_result() -> _SearchOutcome:
        open_lb = min((entry[4] for entry in stack), default=incumbent_mk)
        return _SearchOutcome(best_sequences, incumbent_mk, False, min(open_lb, incumbent_mk), nodes)

    while stack:
        if time.perf_counter() > deadline:
            return timed_out_result()
        depth, sequences, accepted, profit_bound, makespan_lb = stack.pop()
        if profit_bound < pinned_profit - PROFIT_PIN_TOL or makespan_lb >= incumbent_mk:
            continue
        nodes += 1
        if depth == len(order):
            leaf_profit = revenue_for_strips(instance, set(accepted))
            if leaf_profit >= pinned_profit - PROFIT_PIN_TOL and makespan_lb < incumbent_mk:
                incumbent_mk = makespan_lb
                best_sequences = sequences
            continue
        sid = order[depth]
        remaining_after = order[depth + 1 :]

        children = []
        reject_profit = revenue_for_strips(instance, set(accepted) | set(remaining_after))
        if reject_profit >= pinned_profit - PROFIT_PIN_TOL:
            children.append((depth + 1, sequences, accepted, reject_profit, makespan_lb))
        accepted_child = accepted | {sid}
        passes = 0
        for v in problem.windows_of_strip[sid]:
            sat_id = problem.sat_of[v]
            seq = sequences[sat_id]
            for pos in range(len(seq) + 1):
                passes += 1
                if passes % TIME_CHECK_INTERVAL == 0 and time.perf_counter() > deadline:
                    stack.append((depth, sequences, accepted, profit_bound, makespan_lb))
                    return timed_out_result()
                candidate = seq[:pos] + (v,) + seq[pos:]
                ends = problem.forward_pass(candidate)
                if ends is None:
                    continue
                child_sequences = dict(sequences)
                child_sequences[sat_id] = candidate
                # insertions never shorten a sequence's completion, so the
                # running max of per-satellite ends is an admissible bound
                child_lb = max(makespan_lb, ends[-1])
                if child_lb >= incumbent_mk:
                    continue
                children.append((depth + 1, child_sequences, accepted_child, profit_bound, child_lb))
        for child in reversed(children):
            stack.append(child)

    return _SearchOutcome(best_sequences, incumbent_mk, True, incumbent_mk, nodes)


def solve(instance: Instance, config: SolverConfig | None = None) -> Solution:
    """Maximize coverage revenue; proves optimality or reports a bound gap."""
    config = config or SolverConfig()
    try:
        validate_instance(instance)
    except Exception as exc:
        raise SolverInputError(str(exc)) from exc
    t0 = time.perf_counter()
    deadline = t0 + config.time_limit
    problem = _Problem(instance)

    if not instance.vtws:
        solution = _assemble(instance, problem, {}, STATUS_INFEASIBLE_EMPTY, 0.0, time.perf_counter() - t0, 0)
        return solution

    warm = greedy_construct(instance)
    warm_sequences = {
        sat_id: tuple(instance.vtw_index[o.vtw_key] for o in obs) for sat_id, obs in warm.observations.items()
    }
    windowed = [sid for sid, wins in problem.windows_of_strip.items() if wins]
    order = _strip_order(instance, windowed)

    root_bound = revenue_for_strips(instance, set(order))
    if warm.objective >= root_bound:
        logger.debug("warm start met the root bound (%.6f); optimality proven without search", root_bound)
        return _assemble(instance, problem, warm_sequences, STATUS_OPTIMAL, warm.objective, time.perf_counter() - t0, 0)

    outcome = _search_max_profit(instance, problem, order, warm_sequences, deadline)
    logger.debug("profit search explored %d nodes, proven=%s", outcome.nodes, outcome.proven)
    status = STATUS_OPTIMAL if outcome.proven else STATUS_FEASIBLE
    bound = outcome.objective if outcome.proven else outcome.open_bound
    return _assemble(instance, problem, outcome.sequences, status, bound, time.perf_counter() - t0, outcome.nodes)


def solve_lexicographic(instance: Instance, config: SolverConfig | None = None) -> Solution:
    """Maximize revenue, then minimize makespan among revenue-optimal schedules.

    Phase one may use at most half the time limit; phase two receives
    whatever remains. Status is optimal only when both phases prove it.
    """
    config = config or SolverConfig()
    try:
        validate_instance(instance)
    except Exception as exc:
        raise SolverInputError(str(exc)) from exc
    t0 = time.perf_counter()
    problem = _Problem(instance)

    if not instance.vtws:
        return _assemble(instance, problem, {}, STATUS_INFEASIBLE_EMPTY, 0.0, time.perf_counter() - t0, 0)

    warm = greedy_construct(instance)
    warm_sequences = {
        sat_id: tuple(instance.vtw_index[o.vtw_key] for o in obs) for sat_id, obs in warm.observations.items()
    }
    windowed = [sid for sid, wins in problem.windows_of_strip.items() if wins]
    order = _strip_order(instance, windowed)
    root_bound = revenue_for_strips(instance, set(order))

    phase1_deadline = t0 + config.time_limit / 2.0
    if warm.objective >= root_bound:
        phase1 = _SearchOutcome(warm_sequences, warm.objective, True, warm.objective, 0)
    else:
        phase1 = _search_max_profit(instance, problem, order, warm_sequences, phase1_deadline)
    profit_ub = phase1.objective if phase1.proven else phase1.open_bound

    phase2_start = dict(phase1.sequences)
    quick = _greedy_min_makespan(instance, problem, order)
    quick_strips = {problem.strip_of[v] for seq in quick.values() for v in seq}
    if revenue_for_strips(instance, quick_strips) >= phase1.objective - PROFIT_PIN_TOL:
        mk_of = lambda seqs: max(
            (problem.forward_pass(s)[-1] for s in seqs.values() if s), default=0.0
        )
        if mk_of(quick) < mk_of(phase2_start):
            phase2_start = quick

    deadline = t0 + config.time_limit
    phase2 = _search_min_makespan(instance, problem, order, phase1.objective, phase2_start, deadline)

    status = STATUS_OPTIMAL if (phase1.proven and phase2.proven) else STATUS_FEASIBLE
    solution = _assemble(
        instance,
        problem,
        phase2.sequences,
        status,
        profit_ub,
        time.perf_counter() - t0,
        phase1.nodes + phase2.nodes,
    )
    makespan = solution.makespan or 0.0
    if phase2.proven or makespan <= 0.0:
        solution.makespan_gap_percent = 0.0
    else:
        solution.makespan_gap_percent = max(0.0, 100.0 * (makespan - phase2.open_bound) / makespan)
    return solution
