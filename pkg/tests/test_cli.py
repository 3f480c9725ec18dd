"""Command-line interface tests (in-process, via main's exit codes)."""

import json

import pytest

import saeos.cli as cli
from saeos.generator import generate_micro_instance
from saeos.model import (
    deserialize_solution,
    serialize_instance,
    serialize_solution,
)


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Instance files shared by the CLI tests: one real A instance, two micros."""
    root = tmp_path_factory.mktemp("cli")
    inst_dir = root / "instances"
    inst_dir.mkdir()
    code = cli.main(["generate", "--config", "A", "--count", "1", "--seed", "11", "--out", str(inst_dir)])
    assert code == 0
    (inst_dir / "micro-1.json").write_text(serialize_instance(generate_micro_instance(4)))
    (inst_dir / "micro-2.json").write_text(serialize_instance(generate_micro_instance(9)))
    return root


def run(argv):
    try:
        return cli.main(argv)
    except SystemExit as exc:
        return exc.code


class TestGenerate:
    def test_files_written(self, workdir):
        assert (workdir / "instances" / "A-1.json").exists()

    def test_byte_identical_regeneration(self, workdir, tmp_path):
        out = tmp_path / "again"
        assert run(["generate", "--config", "A", "--count", "1", "--seed", "11", "--out", str(out)]) == 0
        assert (out / "A-1.json").read_bytes() == (workdir / "instances" / "A-1.json").read_bytes()

    def test_bad_letter_rejected(self, tmp_path):
        assert run(["generate", "--config", "Z", "--count", "1", "--seed", "1", "--out", str(tmp_path)]) == 2


class TestSolve:
    def test_solve_writes_solution_and_row(self, workdir, tmp_path, capsys):
        sol_path = tmp_path / "sol.json"
        code = run(["solve", str(workdir / "instances" / "A-1.json"), "--time-limit", "60", "--out", str(sol_path)])
        assert code == 0
        out = capsys.readouterr().out
        header, row = out.strip().splitlines()
        assert header.startswith("Ins.,CtSpot,CtPoly")
        assert row.startswith("A-1,")
        solution = deserialize_solution(sol_path.read_text())
        assert solution.status == "optimal"
        assert solution.profit_percent == pytest.approx(100.0)

    def test_lex_row_has_gap_pair(self, workdir, capsys):
        code = run(["solve", str(workdir / "instances" / "micro-1.json"), "--objective", "lex", "--time-limit", "30"])
        assert code == 0
        out = capsys.readouterr().out
        assert '"(' in out

    def test_missing_file_is_input_error(self):
        assert run(["solve", "nope.json"]) == 2

    def test_corrupt_file_is_input_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{broken")
        assert run(["solve", str(bad)]) == 2

    def test_bad_time_limit_is_input_error(self, workdir):
        assert run(["solve", str(workdir / "instances" / "micro-1.json"), "--time-limit", "0"]) == 2

    def test_self_check_failure_exit_code(self, workdir, monkeypatch, capsys):
        from saeos.model import ValidationReport, Violation

        def always_invalid(instance, solution):
            return ValidationReport([Violation("window", "m1", "x", "forced for the test")])

        monkeypatch.setattr(cli, "validate_schedule", always_invalid)
        code = run(["solve", str(workdir / "instances" / "micro-1.json"), "--time-limit", "30"])
        assert code == 3

    def test_solution_files_are_deterministic(self, workdir, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        source = str(workdir / "instances" / "micro-2.json")
        assert run(["solve", source, "--out", str(a)]) == 0
        assert run(["solve", source, "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_figures_rendered(self, workdir, tmp_path):
        figs = tmp_path / "figs"
        code = run(["solve", str(workdir / "instances" / "micro-1.json"), "--figures", str(figs)])
        assert code == 0
        assert (figs / "micro-1_timeline.png").exists()
        assert (figs / "micro-1_map.png").exists()


class TestBenchmark:
    def test_directory_batch(self, workdir, tmp_path, capsys):
        out_csv = tmp_path / "report.csv"
        code = run(["benchmark", str(workdir / "instances"), "--time-limit", "60",
                    "--out", str(out_csv), "--json", str(tmp_path / "report.json")])
        assert code == 0
        lines = out_csv.read_text().strip().splitlines()
        assert lines[0].startswith("Ins.,")
        assert [line.split(",")[0] for line in lines[1:]] == ["A-1", "micro-1", "micro-2"]
        mirror = json.loads((tmp_path / "report.json").read_text())
        assert len(mirror["rows"]) == 3
        assert mirror["groups"]
        fig_dir = tmp_path / "report_figures"
        assert (fig_dir / "overview.png").exists()
        assert (fig_dir / "A-1_timeline.png").exists()

    def test_empty_directory(self, tmp_path, capsys):
        empty = tmp_path / "empty"
        empty.mkdir()
        assert run(["benchmark", str(empty)]) == 0
        out = capsys.readouterr().out
        assert out.startswith("Ins.,")

    def test_corrupt_file_isolated(self, workdir, tmp_path, capsys):
        import shutil

        mixed = tmp_path / "mixed"
        mixed.mkdir()
        shutil.copy(workdir / "instances" / "micro-1.json", mixed / "micro-1.json")
        (mixed / "zz.json").write_text("{broken")
        code = run(["benchmark", str(mixed), "--no-figures"])
        assert code == 0
        out = capsys.readouterr().out
        rows = out.strip().splitlines()
        assert any(r.startswith("micro-1,") and "error" not in r for r in rows)
        assert any(r.startswith("zz,") and "error" in r for r in rows)


class TestVerify:
    def test_oracle_pass(self, workdir, capsys):
        code = run(["verify", str(workdir / "instances" / "micro-1.json")])
        assert code == 0
        assert "PASS" in capsys.readouterr().out

    def test_guard_refusal(self, workdir, capsys):
        code = run(["verify", str(workdir / "instances" / "A-1.json")])
        assert code == 4

    def test_solution_validation_pass(self, workdir, tmp_path, capsys):
        source = str(workdir / "instances" / "micro-1.json")
        sol_path = tmp_path / "sol.json"
        assert run(["solve", source, "--out", str(sol_path)]) == 0
        assert run(["verify", source, "--solution", str(sol_path)]) == 0
        assert "PASS" in capsys.readouterr().out

    def test_mutated_solution_fails_with_violations(self, workdir, tmp_path, capsys):
        source = workdir / "instances" / "micro-1.json"
        sol_path = tmp_path / "sol.json"
        assert run(["solve", str(source), "--out", str(sol_path)]) == 0
        solution = deserialize_solution(sol_path.read_text())
        sat, obs_list = next((s, o) for s, o in solution.observations.items() if o)
        shifted = obs_list[0].__class__(
            satellite_id=obs_list[0].satellite_id,
            strip_id=obs_list[0].strip_id,
            orbit=obs_list[0].orbit,
            sense=obs_list[0].sense,
            start=obs_list[0].start + 1e6,
            duration=obs_list[0].duration,
        )
        solution.observations[sat][0] = shifted
        mutated = tmp_path / "mutated.json"
        mutated.write_text(serialize_solution(solution))
        code = run(["verify", str(source), "--solution", str(mutated)])
        assert code == 1
        out = capsys.readouterr().out
        assert "FAIL" in out
        assert "[window]" in out
