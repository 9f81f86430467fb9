"""End-to-end tests of the CLI commands against the real solvers and filesystem."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from augmented_krylov.adapters.storage import CsvResultsStore
from augmented_krylov.cli.main import cli
from augmented_krylov.core.exceptions import SingularSystemError
from augmented_krylov.core.problems import deriv2


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def invoke(runner, tmp_path):
    def _invoke(*args):
        return runner.invoke(cli, ["--log-dir", str(tmp_path / "logs"), *args])

    return _invoke


class TestRun:
    def test_writes_history_csv(self, invoke, tmp_path):
        """Test that `run` writes a full-precision history CSV."""
        out = tmp_path / "run.csv"
        result = invoke("run", "--n", "64", "--maxit", "5", "--aug", "boundary", "--out", str(out))

        assert result.exit_code == 0, result.output
        assert "method=r3gmres+boundary" in result.output
        assert "History written to" in result.output
        lines = out.read_text().splitlines()
        assert lines[0] == "iteration,residual_estimate,true_residual,relative_error"
        assert 2 <= len(lines) <= 6
        assert lines[1].startswith("1,")

    def test_no_diagnostics_leaves_columns_empty(self, invoke, tmp_path):
        """Test that lazy runs leave the true-residual and error columns blank."""
        out = tmp_path / "lazy.csv"
        args = ["--n", "64", "--maxit", "3", "--tol", "1e-14", "--no-diagnostics"]
        result = invoke("run", *args, "--out", str(out))

        assert result.exit_code == 0, result.output
        assert out.read_text().splitlines()[1].endswith(",,")

    def test_same_arguments_give_identical_files(self, invoke, tmp_path):
        """Test that repeating a run reproduces the file byte for byte."""
        args = ["run", "--problem", "gravity", "--n", "64", "--noise", "1e-3", "--seed", "4"]
        args += ["--maxit", "10"]
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        invoke(*args, "--out", str(first))
        invoke(*args, "--out", str(second))
        assert first.read_bytes() == second.read_bytes()

    @pytest.mark.parametrize(
        ("method", "aug"),
        [
            ("gmres", "none"),
            ("rrgmres", "none"),
            ("gcro", "step"),
            ("r3gmres", "step"),
            ("r3gmres-ref", "step"),
        ],
    )
    def test_gravity_runs_finish_on_every_method(self, invoke, tmp_path, method, aug):
        """Test that the severely ill-conditioned gravity problem runs through."""
        out = tmp_path / f"{method}.csv"
        args = ["--problem", "gravity", "--noise", "1e-4", "--method", method, "--aug", aug]
        result = invoke("run", *args, "--maxit", "25", "--tol", "1e-14", "--out", str(out))

        assert result.exit_code == 0, result.output
        assert len(out.read_text().splitlines()) >= 2

    def test_invalid_size_exits_with_config_error(self, invoke):
        """Test that an invalid problem size exits with the config error code."""
        result = invoke("run", "--n", "1")
        assert result.exit_code == 2
        assert "Invalid configuration" in result.output

    def test_augmented_gmres_exits_with_config_error(self, invoke):
        """Test that augmenting plain GMRES is refused as a config error."""
        result = invoke("run", "--n", "32", "--method", "gmres", "--aug", "boundary")
        assert result.exit_code == 2

    def test_unknown_method_is_rejected_by_click(self, invoke):
        result = invoke("run", "--method", "cg")
        assert result.exit_code == 2

    def test_solver_failure_exits_with_solver_error(self, invoke, mocker):
        """Test that a SolverError maps to its own exit code."""
        mocker.patch(
            "augmented_krylov.cli.main._service.run_experiment",
            side_effect=SingularSystemError("singular", iteration=4),
        )
        result = invoke("run", "--n", "32")
        assert result.exit_code == 3
        assert "Solver failed (iteration 4)" in result.output

    def test_unexpected_failure_exits_with_one(self, invoke, mocker):
        """Test that an unexpected exception exits with status one."""
        mocker.patch(
            "augmented_krylov.cli.main._service.run_experiment",
            side_effect=OSError("disk full"),
        )
        result = invoke("run", "--n", "32")
        assert result.exit_code == 1
        assert "disk full" in result.output


class TestCompare:
    def test_joined_table(self, invoke, tmp_path):
        """Test that `compare` joins several runs into one table."""
        config_file = tmp_path / "compare.json"
        config_file.write_text(
            json.dumps(
                [
                    {"n": 64, "method": "rrgmres", "maxit": 6, "tol": 1e-14},
                    {"n": 64, "aug": "boundary", "maxit": 6, "tol": 1e-14},
                ]
            )
        )
        out = tmp_path / "table.csv"
        result = invoke("compare", str(config_file), "--out", str(out))

        assert result.exit_code == 0, result.output
        assert "rrgmres: method=rrgmres" in result.output
        header = out.read_text().splitlines()[0].split(",")
        assert header[0] == "iteration"
        assert "r3gmres+boundary:relative_error" in header
        assert len(header) == 7

    def test_mismatched_problems_exit_with_config_error(self, invoke, tmp_path):
        """Test that runs on different problems cannot be compared."""
        config_file = tmp_path / "compare.json"
        config_file.write_text(json.dumps([{"n": 64}, {"n": 32}]))
        result = invoke("compare", str(config_file))
        assert result.exit_code == 2
        assert "different problems" in result.output

    def test_missing_file_is_rejected_by_click(self, invoke, tmp_path):
        result = invoke("compare", str(tmp_path / "missing.json"))
        assert result.exit_code == 2


class TestExportProblem:
    def test_writes_matrices(self, invoke, tmp_path):
        """Test that `export` writes the operator, data and augmentation files."""
        out_dir = tmp_path / "deriv2"
        result = invoke("export-problem", "--n", "16", "--noise", "0", "--out-dir", str(out_dir))

        assert result.exit_code == 0, result.output
        store = CsvResultsStore()
        problem = deriv2(16)
        np.testing.assert_array_equal(store.read_matrix(out_dir / "A.txt"), problem.A)
        x_true = store.read_matrix(out_dir / "x_true.txt")
        assert x_true.shape == (16, 1)
        np.testing.assert_array_equal(x_true[:, 0], problem.x_true)
        np.testing.assert_array_equal(
            store.read_matrix(out_dir / "b_noisy.txt")[:, 0], problem.b_true
        )
