"""End-to-end tests for the command-line interface."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from eeikit import cov_to_json
from eeikit.cli import CSV_HEADER, DEFAULT_TOL, SEED_ENV_VAR, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv)
    assert err == ""
    return code, json.loads(out)


class TestConstructCommands:
    def test_construct_l_inline_scalar(self, capsys):
        code, blob = run_json(capsys, "construct-l", "--x", "1", "--w", "3", "--mu", "2")
        assert code == 0
        assert blob["result"]["multiplier"]["rows"] == [[0.25]]
        assert blob["result"]["s_w_tilde"]["rows"] == [[1.0]]
        assert blob["summary"]["margin"] >= -1e-8
        assert blob["summary"]["passed"] is True
        assert blob["config"]["command"] == "construct-l"

    def test_construct_l_from_files(self, capsys, tmp_path):
        x_path = tmp_path / "x.json"
        w_path = tmp_path / "w.json"
        x_path.write_text(json.dumps(cov_to_json(np.array([[1.0]]))))
        w_path.write_text(json.dumps(cov_to_json(np.array([[3.0]]))))
        code, blob = run_json(
            capsys, "construct-l", "--x", str(x_path), "--w", str(w_path), "--mu", "2"
        )
        assert code == 0
        assert blob["result"]["multiplier"]["rows"] == [[0.25]]

    def test_construct_k_inline(self, capsys):
        code, blob = run_json(capsys, "construct-k", "--w", "2", "--v", "1", "--mu", "3")
        assert code == 0
        # threshold: min(2, 1/(3-1)) = 0.5
        assert blob["result"]["s_w_tilde"]["rows"] == [[0.5]]

    def test_optimum_scalar(self, capsys):
        code, blob = run_json(
            capsys, "optimum", "--w", "1", "--v", "4", "--r", "10", "--mu", "2"
        )
        assert code == 0
        assert blob["result"]["s_x_star"]["rows"][0][0] == pytest.approx(2.0, abs=1e-6)
        assert blob["result"]["objective"] == pytest.approx(-2.661391858098673, abs=1e-8)


class TestVerifyCommands:
    def test_verify_eei_uniform(self, capsys):
        code, blob = run_json(
            capsys, "verify-eei", "--density", "uniform", "--mu", "2", "--w", "1", "--r", "1"
        )
        assert code == 0
        assert blob["summary"]["margin"] > 0.0

    def test_verify_epi_defaults_second_density(self, capsys):
        code, blob = run_json(capsys, "verify-epi", "--density", "gaussian:2")
        assert code == 0
        assert abs(blob["summary"]["margin"]) <= 1e-4

    def test_verify_worst_noise(self, capsys):
        code, blob = run_json(
            capsys, "verify-worst-noise", "--density", "gaussian", "--w", "0.5", "--v", "0.5"
        )
        assert code == 0
        assert abs(blob["summary"]["margin"]) <= 1e-5

    def test_variational_check(self, capsys):
        code, blob = run_json(
            capsys,
            "variational-check",
            "--density", "gaussian",
            "--density2", "gaussian:0.5",
            "--mu", "2",
        )
        assert code == 0
        assert blob["result"]["stationarity_rms"] <= 1e-3

    def test_search_small(self, capsys):
        code, blob = run_json(
            capsys,
            "search",
            "--w", "1", "--v", "4", "--r", "10", "--mu", "2",
            "--trials", "500", "--seed", "3",
        )
        assert code == 0
        assert blob["summary"]["trials"] == 500
        assert blob["summary"]["margin"] >= -1e-6


class TestApplicationCommands:
    def test_broadcast_design(self, capsys):
        code, blob = run_json(
            capsys,
            "broadcast-design",
            "--z1", "0.5", "--z2", "2", "--r", "0.5", "--direction", "1",
        )
        assert code == 0
        assert blob["result"]["t_star"] == pytest.approx(2.0 / 3.0, abs=1e-8)
        assert blob["result"]["trace_mse_rx1"] == pytest.approx(2.0 / 7.0, abs=1e-8)

    def test_lmmse_bound(self, capsys):
        code, blob = run_json(capsys, "lmmse-bound", "--x", "1", "--r", "1")
        assert code == 0
        assert blob["result"]["bound_nats"] == pytest.approx(0.5 * math.log(2.0), abs=1e-12)
        assert blob["summary"]["margin"] >= -1e-10


class TestExitCodes:
    def test_bad_mu_is_usage_error(self, capsys):
        code, out, err = run_cli(capsys, "construct-l", "--x", "1", "--w", "1", "--mu", "1")
        assert code == 2
        assert out == ""
        assert "mu must exceed 1" in err

    def test_missing_required_flag(self, capsys):
        code, _, err = run_cli(capsys, "search", "--mu", "2", "--r", "1")
        assert code == 2
        assert "requires --w" in err

    def test_missing_matrix_file(self, capsys):
        code, _, err = run_cli(
            capsys, "construct-l", "--x", "/no/such/file.json", "--w", "1", "--mu", "2"
        )
        assert code == 2
        assert "cannot read" in err

    def test_unknown_density(self, capsys):
        code, _, err = run_cli(capsys, "verify-epi", "--density", "laplace")
        assert code == 2
        assert "unknown density" in err

    def test_math_failure_exit_one(self, capsys):
        code, _, err = run_cli(
            capsys, "broadcast-design", "--z1", "0.5", "--z2", "2", "--r", "3"
        )
        assert code == 1
        assert "ThresholdUnreachable" in err


class TestFormatsAndReproducibility:
    def test_csv_row(self, capsys):
        code, out, err = run_cli(
            capsys, "lmmse-bound", "--x", "1", "--r", "1", "--format", "csv"
        )
        assert code == 0 and err == ""
        header, row, tail = out.split("\n")
        assert header == CSV_HEADER
        assert tail == ""
        fields = row.split(",")
        assert len(fields) == len(CSV_HEADER.split(","))
        assert fields[0] == "lmmse-bound"
        assert fields[-1] == "0"  # elapsed_ms zeroed without --timing

    def test_text_format_status_line(self, capsys):
        code, out, _ = run_cli(
            capsys, "construct-l", "--x", "1", "--w", "3", "--mu", "2", "--format", "text"
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert len(lines) == 5
        assert lines[0].startswith("eeikit ")
        assert "status=PASS" in lines[-1]

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "report.json"
        code, out, _ = run_cli(
            capsys,
            "construct-l", "--x", "1", "--w", "3", "--mu", "2", "--output", str(target),
        )
        assert code == 0
        assert out == ""
        blob = json.loads(target.read_text())
        assert blob["result"]["multiplier"]["rows"] == [[0.25]]

    def test_byte_identical_reports(self, capsys):
        argv = ("search", "--w", "1", "--v", "4", "--r", "10", "--mu", "2",
                "--trials", "400", "--seed", "9")
        _, first, _ = run_cli(capsys, *argv)
        _, second, _ = run_cli(capsys, *argv)
        assert first == second

    def test_seed_from_environment(self, capsys, monkeypatch):
        monkeypatch.setenv(SEED_ENV_VAR, "123")
        _, blob = run_json(
            capsys, "search", "--w", "1", "--v", "4", "--r", "10", "--mu", "2",
            "--trials", "100",
        )
        assert blob["config"]["seed"] == 123

    def test_seed_flag_beats_environment(self, capsys, monkeypatch):
        monkeypatch.setenv(SEED_ENV_VAR, "123")
        _, blob = run_json(
            capsys, "search", "--w", "1", "--v", "4", "--r", "10", "--mu", "2",
            "--trials", "100", "--seed", "7",
        )
        assert blob["config"]["seed"] == 7

    def test_default_tol_is_per_command(self, capsys):
        _, blob = run_json(capsys, "verify-epi", "--density", "uniform")
        assert blob["config"]["tol"] == DEFAULT_TOL["verify-epi"]

    def test_timing_flag_reports_elapsed(self, capsys):
        _, blob = run_json(
            capsys, "construct-l", "--x", "1", "--w", "3", "--mu", "2", "--timing"
        )
        assert "elapsed_ms" in blob["summary"]
        assert blob["config"]["timing"] is True


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "eeikit.cli", "lmmse-bound", "--x", "1", "--r", "1",
         "--format", "csv"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith(CSV_HEADER)
