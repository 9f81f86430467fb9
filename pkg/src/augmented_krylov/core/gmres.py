"""GMRES and range-restricted GMRES with progressive Givens QR."""

import logging
from dataclasses import dataclass, field

import numpy as np

from augmented_krylov.config import DEFAULT_MAXIT, DEFAULT_TOL

from .arnoldi import arnoldi_init, arnoldi_step
from .exceptions import ValidationError
from .linalg import TRIANGULAR_TOL, givens_rotation, solve_triangular_or_least_squares
from .models import GivensPair, IterationRecord, SolveReport
from .operators import CountingOperator

logger = logging.getLogger(__name__)


@dataclass
class ProgressiveQr:
    """QR factorization of H̲_j built one column at a time.

    ``rotated_rhs`` holds b̂ = Q_jᵀ·(V_{j+1}ᵀ r0); its last entry is the
    GMRES residual in the Krylov part.
    """

    rotations: list[GivensPair] = field(default_factory=list)
    r_columns: list[np.ndarray] = field(default_factory=list)
    rotated_rhs: list[float] = field(default_factory=list)

    @classmethod
    def start(cls, first_coefficient: float) -> "ProgressiveQr":
        return cls(rotated_rhs=[float(first_coefficient)])

    @property
    def size(self) -> int:
        return len(self.r_columns)

    @property
    def R(self) -> np.ndarray:
        j = self.size
        R = np.zeros((j, j))
        for col, values in enumerate(self.r_columns):
            R[: col + 1, col] = values
        return R

    def rhs(self, count: int | None = None) -> np.ndarray:
        values = self.rotated_rhs if count is None else self.rotated_rhs[:count]
        return np.array(values)

    @property
    def residual(self) -> float:
        return abs(self.rotated_rhs[-1])

    def is_degenerate(self, tol: float = TRIANGULAR_TOL) -> bool:
        """True when the newest diagonal entry of R is negligible against the largest."""
        if not self.r_columns:
            return False
        largest = max(abs(column[-1]) for column in self.r_columns)
        return abs(self.r_columns[-1][-1]) <= tol * largest


def update_progressive_qr(
    qr: ProgressiveQr, column: np.ndarray, rhs_entry: float = 0.0
) -> ProgressiveQr:
    """Fold the next Hessenberg column into the factorization.

    ``rhs_entry`` is v_{j+1}ᵀ r0, zero for plain GMRES.
    """
    j = qr.size + 1
    column = np.array(column, dtype=float)
    if column.shape[0] != j + 1:
        raise ValidationError(f"Hessenberg column {j} must have length {j + 1}")

    for i, rotation in enumerate(qr.rotations):
        column[i], column[i + 1] = rotation.apply(column[i], column[i + 1])

    rotation, r = givens_rotation(column[j - 1], column[j])
    column[j - 1] = r
    column[j] = 0.0
    qr.rotations.append(rotation)
    qr.r_columns.append(column[:j])

    qr.rotated_rhs.append(float(rhs_entry))
    qr.rotated_rhs[j - 1], qr.rotated_rhs[j] = rotation.apply(
        qr.rotated_rhs[j - 1], qr.rotated_rhs[j]
    )
    return qr


def residual_estimate(qr: ProgressiveQr, complement_norm: float = 0.0) -> float:
    """sqrt(|b̂_{j+1}|² + ‖(I − V_{j+1}V_{j+1}ᵀ)r0‖²).

    Exact GMRES residual norm for the Krylov part; an upper bound for the
    residual of any augmented method that minimizes over a larger space.
    """
    return float(np.hypot(qr.residual, complement_norm))


def krylov_coefficients(qr: ProgressiveQr) -> np.ndarray:
    """y_j = R_j⁻¹ b̂(1:j); the truncated least-squares solution once R_j is degenerate."""
    return solve_triangular_or_least_squares(qr.R, qr.rhs(qr.size))


def record_iteration(
    report: SolveReport,
    op: CountingOperator,
    b: np.ndarray,
    iteration: int,
    estimate: float,
    x: np.ndarray | None,
    x_true: np.ndarray | None,
) -> None:
    """Append a history row; with an iterate, also its true residual and error."""
    record = IterationRecord(iteration=iteration, residual_estimate=estimate)
    if x is not None:
        record.true_residual = float(np.linalg.norm(op.residual(b, x, count=False)))
        report.iterates.append(x.copy())
        if x_true is not None:
            record.relative_error = float(np.linalg.norm(x - x_true) / np.linalg.norm(x_true))
            report.track_best(iteration, record.relative_error, x)
    report.history.append(record)


def trivial_report(method: str, x0: np.ndarray, r0_norm: float) -> SolveReport:
    return SolveReport(x=x0.copy(), iterations=0, converged=True, method=method, r0_norm=r0_norm)


def gmres_solve(
    operator,
    b: np.ndarray,
    x0: np.ndarray | None = None,
    tol: float = DEFAULT_TOL,
    maxit: int = DEFAULT_MAXIT,
    range_restricted: bool = False,
    x_true: np.ndarray | None = None,
    diagnostics: bool = False,
    reorthogonalize: bool = True,
) -> SolveReport:
    """Minimize ‖b − A·x‖ over x0 + K_j(A, w0), w0 = r0 or A·r0.

    The iterate is formed only when the monitored residual drops below
    ``tol·‖r0‖`` or ``maxit`` is reached; ``diagnostics`` forms it at every
    iteration to record true residuals (and errors against ``x_true``).
    """
    if maxit < 1:
        raise ValidationError("maxit must be at least 1")
    op = CountingOperator.wrap(operator)
    b = np.asarray(b, dtype=float)
    x0 = np.zeros(op.n) if x0 is None else np.asarray(x0, dtype=float)
    method = "rrgmres" if range_restricted else "gmres"
    matvecs_before = op.matvecs

    r0 = op.residual(b, x0)
    r0_norm = float(np.linalg.norm(r0))
    if r0_norm == 0.0:
        return trivial_report(method, x0, r0_norm)

    state = arnoldi_init(op, r0, range_restricted, reorthogonalize=reorthogonalize)
    qr = ProgressiveQr.start(state.coefficients[0])
    report = SolveReport(x=x0.copy(), iterations=0, converged=False, method=method, r0_norm=r0_norm)

    def materialize(j: int) -> np.ndarray:
        return x0 + state.V(j) @ krylov_coefficients(qr)

    for j in range(1, maxit + 1):
        step = arnoldi_step(state, op)
        rhs_entry = 0.0 if step.breakdown else state.coefficients[-1]
        update_progressive_qr(qr, step.column, rhs_entry)
        estimate = residual_estimate(qr, state.complement_norm)
        report.iterations = j

        x_j = materialize(j) if diagnostics else None
        record_iteration(report, op, b, j, estimate, x_j, x_true)
        logger.debug("%s iteration %d: residual %.6e", method, j, estimate)

        if estimate <= tol * r0_norm:
            report.converged = True
            break
        if step.breakdown:
            logger.warning("%s: Arnoldi breakdown at iteration %d", method, j)
            report.breakdown = True
            break
        if qr.is_degenerate():
            logger.warning(
                "%s: numerical breakdown, triangular factor degenerate at iteration %d", method, j
            )
            report.breakdown = True
            break

    report.x = report.iterates[-1].copy() if diagnostics else materialize(report.iterations)
    report.matvec_count = op.matvecs - matvecs_before
    report.krylov_basis = state.V(report.iterations)
    report.krylov_coefficients = krylov_coefficients(qr)
    logger.info(
        "%s finished: %d iterations, converged=%s", method, report.iterations, report.converged
    )
    return report

