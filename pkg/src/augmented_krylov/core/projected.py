"""GCRO-style augmented GMRES over the projected Krylov space.

The Krylov space is K_j((I−Φ)A, (I−Φ)w0). With B_j = Cᵀ·A·V_j the modified
Arnoldi relation is A·[U V_j] = [C V_{j+1}]·[[I, B_j], [0, H̲_j]], so the
coupled minimization decouples into a GMRES problem for y_j followed by
z_j = Cᵀr0 − B_j·y_j.
"""

import logging

import numpy as np

from augmented_krylov.config import DEFAULT_MAXIT, DEFAULT_TOL

from .arnoldi import arnoldi_init, arnoldi_step
from .augmentation import AugmentationSpace, apply_phi_complement, empty_augmentation
from .exceptions import ValidationError
from .gmres import (
    ProgressiveQr,
    krylov_coefficients,
    record_iteration,
    residual_estimate,
    trivial_report,
    update_progressive_qr,
)
from .models import SolveReport
from .operators import CountingOperator

logger = logging.getLogger(__name__)


class ProjectedOperator:
    """v ↦ (I − C·Cᵀ)·(A·v); keeps Cᵀ·(A·v) of the latest product."""

    def __init__(self, operator: CountingOperator, space: AugmentationSpace):
        self._op = operator
        self._space = space
        self.last_coefficients = np.zeros(space.k)

    @property
    def shape(self) -> tuple[int, int]:
        return self._op.shape

    def matvec(self, v: np.ndarray) -> np.ndarray:
        raw = self._op.matvec(v)
        self.last_coefficients = self._space.coefficients(raw)
        return raw - self._space.image @ self.last_coefficients


def gcro_solve(
    operator,
    b: np.ndarray,
    x0: np.ndarray | None = None,
    space: AugmentationSpace | None = None,
    tol: float = DEFAULT_TOL,
    maxit: int = DEFAULT_MAXIT,
    range_restricted: bool = False,
    x_true: np.ndarray | None = None,
    diagnostics: bool = False,
    reorthogonalize: bool = True,
) -> SolveReport:
    """Augmented GMRES with a projected Krylov space.

    The monitored residual is exact here (up to rounding): the C-component
    of the residual is removed by z_j, and the rest is the projected GMRES
    residual.
    """
    if maxit < 1:
        raise ValidationError("maxit must be at least 1")
    op = CountingOperator.wrap(operator)
    space = space if space is not None else empty_augmentation(op.n)
    b = np.asarray(b, dtype=float)
    x0 = np.zeros(op.n) if x0 is None else np.asarray(x0, dtype=float)
    matvecs_before = op.matvecs
    k = space.k

    r0 = op.residual(b, x0)
    r0_norm = float(np.linalg.norm(r0))
    if r0_norm == 0.0:
        return trivial_report("gcro", x0, r0_norm)

    c_r0 = space.coefficients(r0)
    target = r0 - space.image @ c_r0
    report = SolveReport(x=x0.copy(), iterations=0, converged=False, method="gcro", r0_norm=r0_norm)
    if not np.any(target):
        report.x = x0 + space.expand(c_r0)
        report.converged = True
        report.augmentation_coefficients = c_r0
        report.matvec_count = op.matvecs - matvecs_before
        return report

    projected = ProjectedOperator(op, space)
    start = apply_phi_complement(space, op.matvec(r0)) if range_restricted else target
    state = arnoldi_init(
        projected, target, range_restricted, start=start, reorthogonalize=reorthogonalize
    )
    qr = ProgressiveQr.start(state.coefficients[0])
    B = np.zeros((k, maxit))

    def materialize(j: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        y = krylov_coefficients(qr)
        z = c_r0 - B[:, :j] @ y
        return x0 + space.expand(z) + state.V(j) @ y, z, y

    for j in range(1, maxit + 1):
        step = arnoldi_step(state, projected)
        B[:, j - 1] = projected.last_coefficients
        report.augmentation_flops += 4 * k * op.n
        rhs_entry = 0.0 if step.breakdown else state.coefficients[-1]
        update_progressive_qr(qr, step.column, rhs_entry)
        estimate = residual_estimate(qr, state.complement_norm)
        report.iterations = j

        x_j = materialize(j)[0] if diagnostics else None
        record_iteration(report, op, b, j, estimate, x_j, x_true)
        logger.debug("gcro iteration %d: residual %.6e", j, estimate)

        if estimate <= tol * r0_norm:
            report.converged = True
            break
        if step.breakdown:
            logger.warning("gcro: Arnoldi breakdown at iteration %d", j)
            report.breakdown = True
            break
        if qr.is_degenerate():
            logger.warning(
                "gcro: numerical breakdown, triangular factor degenerate at iteration %d", j
            )
            report.breakdown = True
            break

    report.x, report.augmentation_coefficients, report.krylov_coefficients = materialize(
        report.iterations
    )
    report.krylov_basis = state.V(report.iterations)
    report.matvec_count = op.matvecs - matvecs_before
    logger.info("gcro finished: %d iterations, converged=%s", report.iterations, report.converged)
    return report
