import numpy as np
import pytest

from augmented_krylov.core.augmentation import build_augmentation
from augmented_krylov.core.exceptions import BreakdownError, ValidationError
from augmented_krylov.core.flexible import fgmres_augmented_cycle
from augmented_krylov.core.gmres import gmres_solve
from augmented_krylov.core.operators import CountingOperator
from augmented_krylov.core.r3gmres import r3gmres_solve


class TestFgmresAugmentedCycle:
    def test_without_w_reduces_to_gmres(self, conditioned_system):
        """Test that a cycle without W is plain GMRES."""
        A, _, b = conditioned_system(30)
        cycle = fgmres_augmented_cycle(A, b, None, None, m=8, tol=1e-14)
        gmres = gmres_solve(A, b, tol=1e-14, maxit=8)
        np.testing.assert_allclose(cycle.residual_estimates, gmres.residual_estimates, rtol=1e-12)
        np.testing.assert_allclose(cycle.x, gmres.x, rtol=1e-10, atol=1e-12)
        assert cycle.augmentation_coefficients.size == 0

    def test_exact_error_direction_solves_the_system(self, conditioned_system):
        """Test that W holding the exact error solves the system."""
        A, x_true, b = conditioned_system(20, cond=100.0)
        x0 = np.ones(20)
        report = fgmres_augmented_cycle(A, b, x0, x_true - x0, m=3)
        assert np.linalg.norm(b - A @ report.x) <= 1e-10 * np.linalg.norm(b)
        assert report.converged

    def test_matches_plain_r3gmres_over_the_same_space(self, conditioned_system, rng):
        """Test that the cycle agrees with plain-mode R3GMRES over the same space."""
        A, _, b = conditioned_system(40, seed=3)
        W = rng.standard_normal((40, 2))
        cycle = fgmres_augmented_cycle(A, b, None, W, m=8, tol=1e-14)
        space = build_augmentation(A, W)
        r3 = r3gmres_solve(A, b, space=space, tol=1e-14, maxit=8, range_restricted=False)
        assert np.linalg.norm(cycle.x - r3.x) <= 1e-8 * np.linalg.norm(r3.x)

    def test_krylov_basis_is_orthonormal(self, conditioned_system, rng):
        """Test the shapes and orthonormality of the returned basis."""
        A, _, b = conditioned_system(30, seed=4)
        report = fgmres_augmented_cycle(A, b, None, rng.standard_normal((30, 3)), m=6)
        V = report.krylov_basis
        assert V.shape == (30, 6)
        assert np.abs(V.T @ V - np.eye(6)).max() <= 1e-12
        assert report.krylov_coefficients.shape == (6,)
        assert report.augmentation_coefficients.shape == (3,)

    def test_residual_never_exceeds_gmres(self, conditioned_system, rng):
        """Test that the cycle never does worse than GMRES with the same budget."""
        A, _, b = conditioned_system(30, seed=5)
        cycle = fgmres_augmented_cycle(A, b, None, rng.standard_normal((30, 2)), m=5)
        gmres = gmres_solve(A, b, tol=1e-14, maxit=5)
        slack = 1e-12 * np.linalg.norm(b)
        assert np.linalg.norm(b - A @ cycle.x) <= np.linalg.norm(b - A @ gmres.x) + slack

    def test_residual_is_orthogonal_to_images_of_search_space(self, conditioned_system, rng):
        A, _, b = conditioned_system(30, seed=6)
        W = rng.standard_normal((30, 2))
        report = fgmres_augmented_cycle(A, b, None, W, m=5)
        r = b - A @ report.x
        AZ = A @ np.column_stack([report.krylov_basis, W])
        ratio = np.linalg.norm(AZ.T @ r) / (np.linalg.norm(r) * np.linalg.norm(AZ))
        assert ratio <= 1e-10

    def test_estimate_matches_true_residual(self, conditioned_system, rng):
        """Test that the monitored residual tracks the true residual."""
        A, _, b = conditioned_system(25, seed=7)
        report = fgmres_augmented_cycle(
            A, b, None, rng.standard_normal((25, 2)), m=4, diagnostics=True
        )
        assert len(report.history) == 6
        np.testing.assert_allclose(
            report.residual_estimates, report.true_residuals, atol=1e-10 * np.linalg.norm(b)
        )

    def test_one_product_per_step(self, conditioned_system, rng):
        """Test that every step of the cycle costs one product."""
        A, _, b = conditioned_system(20)
        op = CountingOperator(A)
        report = fgmres_augmented_cycle(op, b, None, rng.standard_normal((20, 2)), m=4)
        assert report.iterations == 6
        assert report.matvec_count == op.matvecs == 6

    def test_breakdown_ends_cycle_early(self):
        """Test that a lucky breakdown ends the cycle with the exact solution."""
        b = np.array([1.0, 2.0, 2.0])
        report = fgmres_augmented_cycle(np.eye(3), b, None, None, m=2)
        assert report.breakdown
        assert report.iterations == 1
        assert report.converged
        np.testing.assert_allclose(report.x, b)

    def test_strict_breakdown_before_krylov_steps_finish_raises(self):
        """Test that strict mode raises on a breakdown inside the Krylov phase."""
        with pytest.raises(BreakdownError):
            fgmres_augmented_cycle(np.eye(4), np.ones(4), None, None, m=3, strict=True)

    @pytest.mark.parametrize(
        ("m", "W"),
        [
            (0, None),
            (2, np.ones((3, 1))),
            (3, np.ones((4, 2))),
        ],
    )
    def test_invalid_arguments(self, m, W):
        with pytest.raises(ValidationError):
            fgmres_augmented_cycle(np.eye(4), np.ones(4), None, W, m=m)
