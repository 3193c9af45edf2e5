"""End-to-end CLI behavior: exit codes, determinism, CSV, figures."""

import json
import os
import subprocess
import sys

import pytest

from paramin.cli import main


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestAnalyze:
    def test_analyze_corpus_case(self, capsys):
        code, out, err = run_cli(["analyze", "ex4_9", "--at", "0", "--lambda", "1/2", "--budget", "1000"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["schema"] == "paramin-report/1"
        assert payload["checks"]["kn_trunc"]["status"] == "HOLDS"
        assert payload["checks"]["v_usc"]["status"] == "FAILS"
        assert payload["statements"]["COR1.1"]["status"] == "HOLDS"
        assert payload["soundness_violations"] == []
        assert payload["wall_clock_ms"] is None

    def test_analyze_outside_domain_exits_1(self, capsys):
        code, out, err = run_cli(["analyze", "ex4_5", "--at", "2"], capsys)
        assert code == 1
        assert "error" in json.loads(err)

    def test_analyze_missing_file_exits_1(self, capsys):
        code, out, err = run_cli(["analyze", "no_such_file.toml", "--at", "0"], capsys)
        assert code == 1

    def test_analyze_deterministic(self, capsys):
        argv = ["analyze", "ex4_3b", "--at", "0", "--budget", "1000", "--json"]
        code1, out1, _ = run_cli(argv, capsys)
        code2, out2, _ = run_cli(argv, capsys)
        assert code1 == code2 == 0
        assert out1 == out2

    def test_soundness_violation_exits_2(self, capsys, monkeypatch):
        from paramin import cli as cli_mod

        real_evaluate = cli_mod.th.evaluate

        def tampered(problem, focus, config=None, extra_checks=()):
            rep = real_evaluate(problem, focus, config, extra_checks)
            rep.violations.append({"statement": "TH1.3", "conclusion": "v_lsc", "hypotheses": {}, "kind": "conclusion"})
            return rep

        monkeypatch.setattr(cli_mod.th, "evaluate", tampered)
        code, out, err = run_cli(["analyze", "ex4_3b", "--at", "0", "--budget", "1000"], capsys)
        assert code == 2

    def test_bad_problem_file_exits_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.toml"
        bad.write_text('name = "bad"\nx_domain = "[1, 0]"\ny_domain = "[0, 1]"\nu = "x"\nphi = "{0}"\n')
        code, out, err = run_cli(["analyze", str(bad), "--at", "0"], capsys)
        assert code == 1
        assert "error" in json.loads(err)


class TestValueCurve:
    def test_reciprocal_curve(self, capsys):
        code, out, _ = run_cli(["value", "ex4_7", "--range", "0.1", "1", "--samples", "10"], capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "x,value,attained"
        assert len(lines) == 11
        for row in lines[1:]:
            x_s, v_s, att = row.split(",")
            assert abs(float(v_s) - 1.0 / float(x_s)) <= 1e-6
            assert att == "true"

    def test_flat_curve(self, capsys):
        code, out, _ = run_cli(["value", "ex4_5", "--range", "0", "1", "--samples", "11"], capsys)
        assert code == 0
        rows = out.strip().splitlines()[1:]
        assert len(rows) == 11
        assert all(float(r.split(",")[1]) == 0.0 for r in rows)

    def test_unattained_column(self, capsys):
        code, out, _ = run_cli(["value", "ex4_3a", "--range", "0", "1", "--samples", "5"], capsys)
        assert code == 0
        rows = out.strip().splitlines()[1:]
        assert all(r.split(",")[2] == "false" for r in rows)

    def test_curve_deterministic(self, capsys):
        argv = ["value", "ex4_7", "--range", "0.1", "1", "--samples", "25"]
        _, out1, _ = run_cli(argv, capsys)
        _, out2, _ = run_cli(argv, capsys)
        assert out1 == out2

    def test_plot_renders_file(self, tmp_path, capsys):
        target = tmp_path / "curve.png"
        code, out, _ = run_cli(
            ["value", "ex4_7", "--range", "0.1", "1", "--samples", "12", "--plot", str(target)], capsys
        )
        assert code == 0
        assert target.exists() and target.stat().st_size > 1000
        assert out.startswith("x,value,attained")

    def test_usage_errors(self, capsys):
        code, _, err = run_cli(["value", "ex4_7", "--range", "1", "0.1", "--samples", "5"], capsys)
        assert code == 1
        code, _, err = run_cli(["value", "ex4_7", "--range", "0.1", "1", "--samples", "1"], capsys)
        assert code == 1


class TestCorpusCommand:
    def test_single_case(self, capsys):
        code, out, _ = run_cli(["corpus", "run", "ex4_6"], capsys)
        assert code == 0
        assert "ex4_6: ok" in out

    def test_unknown_case(self, capsys):
        code, _, err = run_cli(["corpus", "run", "ex9_9"], capsys)
        assert code == 1

    def test_skip_stub_reported(self, capsys):
        code, out, _ = run_cli(["corpus", "run", "ex4_2"], capsys)
        assert code == 0
        assert "SKIPPED" in out


class TestConsoleEntry:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "paramin.cli", "--version"],
            capture_output=True,
            text=True,
            cwd=os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
        )
        assert proc.returncode == 0
        assert "paramin" in proc.stdout
