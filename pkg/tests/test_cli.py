"""End-to-end CLI runs: JSON I/O, exit-code contract, round trips."""

import json
import subprocess
import sys

import numpy as np
import pytest

from gleason.hilbert import random_density_matrix, standard_basis
from gleason.reconstruct import explicit_query_vectors
from gleason.serialize import (
    dump_json,
    matrix_from_json,
    matrix_to_json,
    oracle_table_to_json,
)
from gleason.valuation import ExactOracle


def run(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "gleason", *map(str, args)],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


class TestGen:
    def test_deterministic_files(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert run("gen", "--dim", 3, "--rank", 1, "--seed", 7, "--out", a).returncode == 0
        assert run("gen", "--dim", 3, "--rank", 1, "--seed", 7, "--out", b).returncode == 0
        assert a.read_text() == b.read_text()

    def test_dim_one_is_scalar_one(self, tmp_path):
        out = tmp_path / "one.json"
        assert run("gen", "--dim", 1, "--out", out).returncode == 0
        m = matrix_from_json(json.loads(out.read_text()))
        assert m.tolist() == [[1.0]]

    def test_gen_then_verify_density(self, tmp_path):
        state = tmp_path / "state.json"
        run("gen", "--dim", 4, "--rank", 4, "--seed", 1, "--out", state)
        result = run("verify", "--suite", "density", "--in", state)
        assert result.returncode == 0
        assert "ok" in result.stdout

    def test_unwritable_path_fails_nonzero(self, tmp_path):
        result = run("gen", "--dim", 2, "--out", tmp_path / "missing" / "x.json")
        assert result.returncode == 3
        assert result.stderr.strip()


class TestReconstruct:
    def test_explicit_budget_and_residual(self, tmp_path):
        state, report = tmp_path / "s.json", tmp_path / "r.json"
        run("gen", "--dim", 3, "--seed", 2, "--out", state)
        result = run("reconstruct", "--method", "explicit", "--in", state, "--out", report)
        assert result.returncode == 0
        payload = json.loads(report.read_text())
        assert payload["query_count"] == 15
        assert payload["residual"] <= 1e-12

    def test_pauli2d_equals_explicit(self, tmp_path):
        state = tmp_path / "q.json"
        run("gen", "--dim", 2, "--seed", 3, "--out", state)
        r1 = tmp_path / "r1.json"
        r2 = tmp_path / "r2.json"
        run("reconstruct", "--method", "pauli2d", "--in", state, "--out", r1)
        run("reconstruct", "--method", "explicit", "--in", state, "--out", r2)
        m1 = matrix_from_json(json.loads(r1.read_text())["estimate"])
        m2 = matrix_from_json(json.loads(r2.read_text())["estimate"])
        assert np.linalg.norm(m1 - m2) <= 1e-12

    def test_haar_average_single_basis_has_unit_trace(self, tmp_path):
        state, report = tmp_path / "s.json", tmp_path / "r.json"
        run("gen", "--dim", 3, "--seed", 4, "--out", state)
        result = run(
            "reconstruct", "--method", "haar-average", "--num-bases", 1,
            "--in", state, "--out", report,
        )
        assert result.returncode == 0
        est = matrix_from_json(json.loads(report.read_text())["estimate"])
        assert abs(np.trace(est).real - 1.0) < 1e-10

    def test_explicit_real_route(self, tmp_path):
        state, report = tmp_path / "s.json", tmp_path / "r.json"
        run("gen", "--dim", 3, "--seed", 5, "--field", "real", "--out", state)
        result = run("reconstruct", "--method", "explicit-real", "--in", state, "--out", report)
        assert result.returncode == 0
        payload = json.loads(report.read_text())
        assert payload["query_count"] == 9

    def test_tabulated_oracle_input(self, tmp_path):
        rho = random_density_matrix(3, 3, seed=6)
        oracle = ExactOracle(rho)
        rows = explicit_query_vectors(standard_basis(3))
        table = tmp_path / "table.json"
        dump_json(oracle_table_to_json(rows, oracle.query_batch(rows)), table)
        report = tmp_path / "r.json"
        result = run("reconstruct", "--method", "explicit", "--in", table, "--out", report)
        assert result.returncode == 0
        est = matrix_from_json(json.loads(report.read_text())["estimate"])
        assert np.linalg.norm(est - rho.matrix) <= 1e-9  # table matching tolerance

    def test_incomplete_table_is_parse_error(self, tmp_path):
        rho = random_density_matrix(3, 3, seed=7)
        oracle = ExactOracle(rho)
        rows = explicit_query_vectors(standard_basis(3))[:5]  # missing entries
        table = tmp_path / "table.json"
        dump_json(oracle_table_to_json(rows, oracle.query_batch(rows)), table)
        result = run("reconstruct", "--method", "explicit", "--in", table)
        assert result.returncode == 3

    def test_pauli2d_wrong_dim_is_usage_error(self, tmp_path):
        state = tmp_path / "s.json"
        run("gen", "--dim", 3, "--seed", 8, "--out", state)
        result = run("reconstruct", "--method", "pauli2d", "--in", state)
        assert result.returncode == 2

    def test_nonconvergence_exit_code(self, tmp_path):
        state = tmp_path / "s.json"
        run("gen", "--dim", 2, "--seed", 9, "--out", state)
        result = run(
            "reconstruct", "--method", "implicit", "--in", state,
            "--shots", 50, "--tol", "1e-14", "--seed", 10,
        )
        assert result.returncode == 5
        assert "non-convergence" in result.stderr


class TestVerifyCommand:
    def test_trace_violation_fails_with_exit_4(self, tmp_path):
        state = tmp_path / "s.json"
        run("gen", "--dim", 2, "--seed", 11, "--out", state)
        payload = json.loads(state.read_text())
        payload["re"][0][0] += 0.01  # trace 1.01 now
        state.write_text(json.dumps(payload))
        result = run("verify", "--suite", "density", "--in", state)
        assert result.returncode == 4
        assert "FAIL" in result.stdout

    def test_malformed_json_is_parse_error(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{oops")
        result = run("verify", "--suite", "density", "--in", bad)
        assert result.returncode == 3

    def test_haar_moment_suite(self):
        result = run("verify", "--suite", "haar-moment", "--dim", 2, "--num-bases", 2000)
        assert result.returncode == 0

    def test_all_suites_with_state(self, tmp_path):
        state = tmp_path / "s.json"
        run("gen", "--dim", 3, "--seed", 12, "--out", state)
        result = run(
            "verify", "--suite", "all", "--in", state, "--num-bases", 500, "--seed", 13
        )
        assert result.returncode == 0
        lines = [ln for ln in result.stdout.splitlines() if ln.startswith("[")]
        reports = json.loads(lines[-1])
        assert {r["check"] for r in reports} == {
            "density", "additivity", "basis-independence", "unistochastic", "haar-moment"
        }
        assert all(r["pass"] for r in reports)

    def test_missing_input_is_usage_error(self):
        result = run("verify", "--suite", "density")
        assert result.returncode == 2

    def test_json_report_written(self, tmp_path):
        state, out = tmp_path / "s.json", tmp_path / "checks.json"
        run("gen", "--dim", 2, "--seed", 14, "--out", state)
        run("verify", "--suite", "density", "--in", state, "--out", out)
        payload = json.loads(out.read_text())
        assert payload[0]["check"] == "density" and payload[0]["pass"]


class TestCompare:
    def test_file_vs_itself_is_zero(self, tmp_path):
        state = tmp_path / "s.json"
        run("gen", "--dim", 3, "--seed", 15, "--out", state)
        result = run("compare", state, state)
        assert result.returncode == 0
        assert float(result.stdout.split()[-1]) == 0.0

    def test_known_distance(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        dump_json(matrix_to_json(np.eye(2) / 2), a)
        dump_json(matrix_to_json(np.diag([1.0, 0.0])), b)
        result = run("compare", a, b, "--tol", "1e-10")
        assert result.returncode == 4
        distance = float(result.stdout.split()[-1])
        assert abs(distance - 1 / np.sqrt(2)) < 1e-12

    def test_explicit_vs_implicit_within_tolerance(self, tmp_path):
        state = tmp_path / "s.json"
        run("gen", "--dim", 3, "--seed", 16, "--out", state)
        r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
        run("reconstruct", "--method", "explicit", "--in", state, "--out", r1)
        run("reconstruct", "--method", "implicit", "--in", state, "--out", r2)
        result = run("compare", r1, r2, "--tol", "1e-6")
        assert result.returncode == 0

    def test_usage_error_without_args(self):
        assert run("compare").returncode == 2


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_round_trip_gen_reconstruct_compare(tmp_path, dim):
    state = tmp_path / "s.json"
    report = tmp_path / "r.json"
    assert run("gen", "--dim", dim, "--seed", 17, "--out", state).returncode == 0
    assert (
        run("reconstruct", "--method", "explicit", "--in", state, "--out", report).returncode
        == 0
    )
    assert run("compare", report, state, "--tol", "1e-10").returncode == 0
