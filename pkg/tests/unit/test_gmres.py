import logging

import numpy as np
import pytest

from augmented_krylov.core.exceptions import ValidationError
from augmented_krylov.core.gmres import (
    ProgressiveQr,
    gmres_solve,
    residual_estimate,
    update_progressive_qr,
)
from augmented_krylov.core.linalg import dense_least_squares
from augmented_krylov.core.operators import CountingOperator
from augmented_krylov.core.problems import add_noise, gravity


class TestProgressiveQr:
    def test_is_degenerate_compares_newest_diagonal_with_largest(self):
        """Test that a negligible newest pivot is flagged as degenerate."""
        qr = update_progressive_qr(ProgressiveQr.start(1.0), np.array([2.0, 0.0]))
        assert not qr.is_degenerate()
        update_progressive_qr(qr, np.array([1.0, 1e-17, 0.0]))
        assert qr.is_degenerate()
        assert not ProgressiveQr.start(1.0).is_degenerate()

    def test_first_column_pure_swap(self):
        """Test that a zero diagonal entry yields a pure swap rotation."""
        qr = update_progressive_qr(ProgressiveQr.start(1.0), np.array([0.0, 1.0]))
        rotation = qr.rotations[0]
        assert (rotation.c, rotation.s) == (0.0, 1.0)
        assert qr.R[0, 0] == 1.0

    def test_triangular_column_gives_identity_rotation(self):
        """Test that an already triangular column is left unrotated."""
        qr = update_progressive_qr(ProgressiveQr.start(1.0), np.array([2.0, 0.0]))
        assert (qr.rotations[0].c, qr.rotations[0].s) == (1.0, 0.0)
        assert qr.residual == 0.0

    @pytest.mark.parametrize("seed", range(100))
    def test_matches_batch_qr(self, seed):
        """Test that column-by-column rotations reproduce a batch QR of H̲ up to row signs."""
        rng = np.random.default_rng(seed)
        j = int(rng.integers(2, 20))
        H = np.triu(rng.standard_normal((j + 1, j)), -1)
        qr = ProgressiveQr.start(1.0)
        for col in range(j):
            update_progressive_qr(qr, H[: col + 2, col])
        _, R_batch = np.linalg.qr(H)
        np.testing.assert_allclose(np.abs(qr.R), np.abs(R_batch), atol=1e-13 * np.linalg.norm(H))
        assert all(rotation.is_orthogonal() for rotation in qr.rotations)

    def test_rotated_rhs_gives_least_squares_residual(self, rng):
        """Test that the last rotated entry equals the least-squares residual."""
        H = np.triu(rng.standard_normal((5, 4)), -1)
        beta = 2.5
        qr = ProgressiveQr.start(beta)
        for j in range(4):
            update_progressive_qr(qr, H[: j + 2, j])
        rhs = np.zeros(5)
        rhs[0] = beta
        y = dense_least_squares(H, rhs)
        assert qr.residual == pytest.approx(np.linalg.norm(H @ y - rhs), rel=1e-12)

    def test_wrong_column_length_raises(self):
        """Test that a column of the wrong length is rejected."""
        with pytest.raises(ValidationError):
            update_progressive_qr(ProgressiveQr.start(1.0), np.array([1.0, 2.0, 3.0]))


def test_residual_estimate_combines_terms():
    """Test that the estimate is the hypotenuse of the Krylov and complement parts."""
    qr = update_progressive_qr(ProgressiveQr.start(5.0), np.array([3.0, 4.0]))
    assert residual_estimate(qr) == pytest.approx(qr.residual)
    assert residual_estimate(qr, 0.0) == pytest.approx(4.0)
    assert residual_estimate(qr, 3.0) == pytest.approx(5.0)


class TestGmresSolve:
    def test_identity_converges_in_one_step(self, rng):
        """Test that GMRES solves an identity system in one step."""
        b = rng.standard_normal(5)
        report = gmres_solve(np.eye(5), b)
        assert report.converged
        assert report.iterations == 1
        np.testing.assert_allclose(report.x, b)

    def test_diagonal_two_by_two(self):
        """Test the exact two-step solve of a diagonal system."""
        A = np.diag([2.0, 1.0])
        report = gmres_solve(A, np.array([1.0, 1.0]), diagnostics=True)
        assert report.iterations == 2
        np.testing.assert_allclose(report.x, [0.5, 1.0], atol=1e-13)
        np.testing.assert_allclose(report.residual_estimates, report.true_residuals, atol=1e-13)

    def test_plain_estimate_equals_true_residual(self, conditioned_system):
        """Test that the plain GMRES estimate tracks the true residual."""
        A, _, b = conditioned_system(30)
        report = gmres_solve(A, b, tol=1e-14, maxit=12, diagnostics=True)
        np.testing.assert_allclose(
            report.residual_estimates,
            report.true_residuals,
            atol=1e-10 * np.linalg.norm(b),
        )

    def test_monitored_residual_is_nonincreasing(self, conditioned_system):
        """Test that the monitored residual never increases in either mode."""
        A, _, b = conditioned_system(30, seed=3)
        for range_restricted in (False, True):
            report = gmres_solve(A, b, tol=1e-14, maxit=15, range_restricted=range_restricted)
            assert np.all(np.diff(report.residual_estimates) <= 1e-12 * np.linalg.norm(b))

    def test_matches_dense_least_squares_over_krylov_images(self, conditioned_system):
        A, _, b = conditioned_system(25, seed=5)
        report = gmres_solve(A, b, tol=1e-14, maxit=6)
        AV = A @ report.krylov_basis
        y = dense_least_squares(AV, b)
        oracle = np.linalg.norm(b - AV @ y)
        assert np.linalg.norm(b - A @ report.x) == pytest.approx(oracle, rel=1e-10)

    def test_range_restricted_estimate_includes_complement(self):
        """Test that RRGMRES reports the part of b outside the range of A."""
        A = np.diag([3.0, 2.0, 1.0, 0.5, 0.0])
        b = np.ones(5)
        report = gmres_solve(A, b, tol=1e-14, maxit=10, range_restricted=True, diagnostics=True)
        assert report.breakdown
        assert not report.converged
        assert report.residual_estimates[-1] == pytest.approx(1.0, abs=1e-10)
        assert report.true_residuals[-1] == pytest.approx(1.0, abs=1e-10)
        np.testing.assert_allclose(report.x[:4], [1 / 3, 1 / 2, 1.0, 2.0], rtol=1e-9)

    def test_zero_rhs_returns_initial_guess(self):
        """Test that a zero right-hand side returns the initial guess unchanged."""
        report = gmres_solve(np.eye(3), np.zeros(3))
        assert report.converged
        assert report.iterations == 0
        np.testing.assert_array_equal(report.x, np.zeros(3))

    def test_lazy_mode_records_estimates_only(self, conditioned_system):
        """Test that without diagnostics no iterates or true residuals are kept."""
        A, _, b = conditioned_system(20)
        report = gmres_solve(A, b, tol=1e-14, maxit=5)
        assert len(report.history) == 5
        assert all(rec.true_residual is None for rec in report.history)
        assert report.iterates == []

    def test_relative_errors_against_exact_solution(self, conditioned_system):
        A, x_true, b = conditioned_system(20, cond=10.0)
        report = gmres_solve(A, b, tol=1e-12, maxit=20, x_true=x_true, diagnostics=True)
        assert report.converged
        assert report.final_relative_error < 1e-9
        assert report.best_error == min(report.relative_errors)

    def test_matvec_counts(self, conditioned_system):
        """Test that a warm start or range restriction costs one extra product."""
        A, _, b = conditioned_system(20)
        plain = gmres_solve(A, b, tol=1e-14, maxit=7)
        restricted = gmres_solve(A, b, tol=1e-14, maxit=7, range_restricted=True)
        from_guess = gmres_solve(A, b, x0=np.ones(20), tol=1e-14, maxit=7)
        assert plain.matvec_count == 7
        assert restricted.matvec_count == 8
        assert from_guess.matvec_count == 8

    def test_diagnostic_products_are_not_counted(self, conditioned_system):
        A, _, b = conditioned_system(20)
        op = CountingOperator(A)
        report = gmres_solve(op, b, tol=1e-14, maxit=5, diagnostics=True)
        assert report.matvec_count == op.matvecs == 5

    def test_invalid_maxit(self):
        """Test that a nonpositive iteration limit is rejected."""
        with pytest.raises(ValidationError):
            gmres_solve(np.eye(2), np.ones(2), maxit=0)

    def test_degenerate_triangular_factor_stops_with_breakdown(
        self, conditioned_system, mocker, caplog
    ):
        """Test that a degenerate R ends the run with the iterate at that step."""
        A, _, b = conditioned_system(30, seed=2)
        mocker.patch.object(
            ProgressiveQr,
            "is_degenerate",
            autospec=True,
            side_effect=lambda qr, *args, **kwargs: qr.size == 3,
        )
        with caplog.at_level(logging.WARNING):
            report = gmres_solve(A, b, tol=1e-14, maxit=10)

        assert report.breakdown
        assert report.iterations == 3
        assert "numerical breakdown" in caplog.text
        mocker.stopall()
        np.testing.assert_allclose(report.x, gmres_solve(A, b, tol=1e-14, maxit=3).x)

    @pytest.mark.parametrize("range_restricted", [False, True])
    def test_severely_ill_conditioned_problem_runs_to_completion(self, range_restricted):
        """Test that gravity with noisy data never aborts on a singular factor."""
        problem = gravity(256, discontinuity_at=0.5)
        b = add_noise(problem.b_true, 1e-4, seed=0)
        report = gmres_solve(
            problem.A, b, tol=1e-14, maxit=100, range_restricted=range_restricted
        )
        assert np.all(np.isfinite(report.x))
        assert report.breakdown or report.iterations == 100
        assert np.linalg.norm(b - problem.A @ report.x) <= np.linalg.norm(b)
