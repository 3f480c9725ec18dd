"""Command-line front end: generate, solve, benchmark, verify.

Exit codes: 0 success (or verification PASS), 1 verification FAIL,
2 input/usage error, 3 internal self-check failure, 4 oracle guard refusal.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .generator import CONFIG_TARGET_COUNTS, generate_instance
from .model import (
    InstanceFormatError,
    InstanceValidationError,
    deserialize_instance,
    deserialize_solution,
    dumps_canonical,
    serialize_instance,
    serialize_solution,
    validate_schedule,
)
from .oracle import OracleSizeError, brute_force_solve
from .report import (
    REPORT_COLUMNS,
    build_report_row,
    error_row,
    rows_to_csv,
    sequencing_relation_count,
    summarize_groups,
    summary_table,
)
from .solver import SolverConfig, SolverConfigError, SolverInputError, solve, solve_lexicographic

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_SELFCHECK = 3
EXIT_GUARD = 4


class CliError(SystemExit):
    """SystemExit that prints its message to stderr first."""

    def __init__(self, code: int, message: str):
        print(message, file=sys.stderr)
        super().__init__(code)


def _load_instance(path: Path):
    try:
        return deserialize_instance(path.read_text())
    except FileNotFoundError:
        raise CliError(EXIT_INPUT, f"error: no such file: {path}")
    except (InstanceFormatError, InstanceValidationError) as exc:
        raise CliError(EXIT_INPUT, f"error: {path}: {exc}")


def _solver_config(args) -> SolverConfig:
    try:
        return SolverConfig(
            time_limit=args.time_limit,
            objective_mode="lexicographic" if args.objective == "lex" else "single",
            rng_seed=args.seed,
            worker_count=args.workers,
        )
    except SolverConfigError as exc:
        raise CliError(EXIT_INPUT, f"error: {exc}")


def _run_solver(instance, config: SolverConfig):
    if config.objective_mode == "lexicographic":
        return solve_lexicographic(instance, config)
    return solve(instance, config)


def cmd_generate(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for index in range(1, args.count + 1):
        t0 = time.perf_counter()
        instance = generate_instance(args.config, index, args.seed)
        path = out_dir / f"{args.config}-{index}.json"
        path.write_text(serialize_instance(instance))
        print(
            f"{path} strips={len(instance.strips)} vtws={len(instance.vtws)} "
            f"({time.perf_counter() - t0:.1f}s)"
        )
    return EXIT_OK


def cmd_solve(args) -> int:
    instance = _load_instance(Path(args.instance))
    config = _solver_config(args)
    try:
        solution = _run_solver(instance, config)
    except SolverInputError as exc:
        raise CliError(EXIT_INPUT, f"error: {exc}")

    report = validate_schedule(instance, solution)
    if not report.valid:
        for violation in report.violations:
            print(f"self-check violation [{violation.kind}] {violation.message}", file=sys.stderr)
        return EXIT_SELFCHECK

    if args.out:
        Path(args.out).write_text(serialize_solution(solution))
    row = build_report_row(Path(args.instance).stem, instance, solution)
    print(rows_to_csv([row]), end="")

    if args.figures:
        from . import figures

        fig_dir = Path(args.figures)
        fig_dir.mkdir(parents=True, exist_ok=True)
        stem = Path(args.instance).stem
        figures.schedule_timeline(instance, solution, fig_dir / f"{stem}_timeline.png")
        figures.instance_map(instance, fig_dir / f"{stem}_map.png", solution)
    return EXIT_OK


def cmd_benchmark(args) -> int:
    directory = Path(args.directory)
    if not directory.is_dir():
        raise CliError(EXIT_INPUT, f"error: not a directory: {directory}")
    config = _solver_config(args)
    rows = []
    pair_relations = {}
    keep = {}
    for path in sorted(directory.glob("*.json")):
        instance_id = path.stem
        try:
            instance = deserialize_instance(path.read_text())
            solution = _run_solver(instance, config)
            if not validate_schedule(instance, solution).valid:
                raise RuntimeError("solver output failed schedule validation")
        except Exception as exc:  # isolate per-instance failures
            print(f"{instance_id}: {exc}", file=sys.stderr)
            rows.append(error_row(instance_id, str(exc)))
            continue
        rows.append(build_report_row(instance_id, instance, solution))
        pair_relations[instance_id] = sequencing_relation_count(instance)
        keep[instance_id] = (instance, solution)

    csv_text = rows_to_csv(rows)
    print(csv_text, end="")
    summaries = summarize_groups(rows, pair_relations)
    if summaries:
        print()
        print(summary_table(summaries), end="")

    if args.out:
        Path(args.out).write_text(csv_text)
    if args.json:
        doc = {
            "rows": [dict(zip(REPORT_COLUMNS, r.cells())) for r in rows],
            "groups": [vars(s) for s in summaries],
        }
        Path(args.json).write_text(dumps_canonical(doc))

    render_figures = (args.out is not None or args.figures is not None) and not args.no_figures
    if render_figures:
        from . import figures

        fig_dir = Path(args.figures) if args.figures else Path(args.out).parent / (Path(args.out).stem + "_figures")
        fig_dir.mkdir(parents=True, exist_ok=True)
        figures.benchmark_overview(rows, fig_dir / "overview.png")
        for instance_id, (instance, solution) in keep.items():
            figures.schedule_timeline(instance, solution, fig_dir / f"{instance_id}_timeline.png")
    return EXIT_OK


def cmd_verify(args) -> int:
    instance = _load_instance(Path(args.instance))
    if args.solution:
        try:
            solution = deserialize_solution(Path(args.solution).read_text())
        except FileNotFoundError:
            raise CliError(EXIT_INPUT, f"error: no such file: {args.solution}")
        except InstanceFormatError as exc:
            raise CliError(EXIT_INPUT, f"error: {args.solution}: {exc}")
        report = validate_schedule(instance, solution)
        if report.valid:
            print("PASS: solution satisfies all schedule constraints")
            return EXIT_OK
        print("FAIL: solution violates the schedule constraints:")
        for violation in report.violations:
            print(f"  [{violation.kind}] sat={violation.satellite_id} strip={violation.strip_id}: {violation.message}")
        return EXIT_FAIL

    try:
        reference = brute_force_solve(instance)
    except OracleSizeError as exc:
        raise CliError(EXIT_GUARD, f"error: {exc}")
    solution = solve(instance, SolverConfig(time_limit=args.time_limit))
    print(f"solver objective: {solution.objective!r}")
    print(f"oracle objective: {reference.objective!r}")
    if solution.objective == reference.objective and validate_schedule(instance, solution).valid:
        print("PASS: solver matches the exhaustive reference exactly")
        return EXIT_OK
    print("FAIL: solver disagrees with the exhaustive reference")
    return EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="saeos",
        description="Exact scheduling toolkit for super-agile Earth-observation constellations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate benchmark instances")
    gen.add_argument("--config", required=True, choices=sorted(CONFIG_TARGET_COUNTS), help="target mix letter")
    gen.add_argument("--count", type=int, default=10, help="instances to generate")
    gen.add_argument("--seed", type=int, default=0, help="master seed")
    gen.add_argument("--out", required=True, help="output directory")
    gen.set_defaults(func=cmd_generate)

    def add_solver_args(p):
        p.add_argument("--time-limit", type=float, default=3600.0, help="wall-clock budget in seconds")
        p.add_argument("--objective", choices=["single", "lex"], default="single")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=1, help="advisory; execution is single-threaded")

    sol = sub.add_parser("solve", help="solve one instance file")
    sol.add_argument("instance", help="instance JSON path")
    add_solver_args(sol)
    sol.add_argument("--out", help="write the solution JSON here")
    sol.add_argument("--figures", help="render schedule figures into this directory")
    sol.set_defaults(func=cmd_solve)

    bench = sub.add_parser("benchmark", help="solve every instance in a directory")
    bench.add_argument("directory")
    add_solver_args(bench)
    bench.add_argument("--out", help="write the CSV table here")
    bench.add_argument("--json", help="also write a JSON mirror of the report")
    bench.add_argument("--figures", help="figure output directory")
    bench.add_argument("--no-figures", action="store_true", help="disable figure rendering")
    bench.set_defaults(func=cmd_benchmark)

    ver = sub.add_parser("verify", help="cross-check the solver against the exhaustive reference")
    ver.add_argument("instance")
    ver.add_argument("--solution", help="validate this solution file instead of running the oracle")
    ver.add_argument("--time-limit", type=float, default=60.0)
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
