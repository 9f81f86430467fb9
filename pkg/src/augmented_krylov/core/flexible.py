"""One cycle of flexible-GMRES-based augmentation.

The first m steps are ordinary Arnoldi steps on v_1..v_m; the next k steps
apply A to the columns of W instead. With Z = [V_m, W] the flexible
relation A·Z = V_{m+k+1}·H̲ holds, and the residual is minimized over
x0 + K_m(A, r0) + range(W).
"""

import logging

import numpy as np

from augmented_krylov.config import DEFAULT_TOL

from .arnoldi import arnoldi_init, arnoldi_step
from .exceptions import BreakdownError, ValidationError
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


def fgmres_augmented_cycle(
    operator,
    b: np.ndarray,
    x0: np.ndarray | None,
    W: np.ndarray | None,
    m: int,
    tol: float = DEFAULT_TOL,
    x_true: np.ndarray | None = None,
    diagnostics: bool = False,
    strict: bool = False,
    reorthogonalize: bool = True,
) -> SolveReport:
    """Run m Krylov steps followed by k augmentation steps, then minimize.

    Step i multiplies v_i for i ≤ m and w_{i−m} for i > m. A breakdown ends
    the cycle early and the solution is taken in the space built so far;
    with ``strict`` a breakdown before the Krylov steps finish raises
    :class:`BreakdownError` instead.
    """
    op = CountingOperator.wrap(operator)
    b = np.asarray(b, dtype=float)
    x0 = np.zeros(op.n) if x0 is None else np.asarray(x0, dtype=float)
    W = np.zeros((op.n, 0)) if W is None else np.asarray(W, dtype=float)
    if W.ndim == 1:
        W = W[:, None]
    k = W.shape[1]
    if m < 1:
        raise ValidationError("m must be at least 1")
    if W.shape[0] != op.n:
        raise ValidationError(f"W has {W.shape[0]} rows, operator has dimension {op.n}")
    if m + k > op.n:
        raise ValidationError(f"m + k = {m + k} exceeds the problem dimension {op.n}")
    matvecs_before = op.matvecs

    r0 = op.residual(b, x0)
    r0_norm = float(np.linalg.norm(r0))
    if r0_norm == 0.0:
        return trivial_report("fgmres-aug", x0, r0_norm)

    state = arnoldi_init(op, r0, reorthogonalize=reorthogonalize)
    qr = ProgressiveQr.start(state.coefficients[0])
    report = SolveReport(
        x=x0.copy(), iterations=0, converged=False, method="fgmres-aug", r0_norm=r0_norm
    )
    directions: list[np.ndarray] = []

    def materialize() -> tuple[np.ndarray, np.ndarray]:
        y = krylov_coefficients(qr)
        return y, x0 + np.column_stack(directions) @ y

    for i in range(1, m + k + 1):
        direction = state.basis[i - 1] if i <= m else W[:, i - m - 1]
        directions.append(direction)
        step = arnoldi_step(state, op, vector=direction)
        update_progressive_qr(qr, step.column)
        estimate = residual_estimate(qr)
        report.iterations = i

        x_i = materialize()[1] if diagnostics else None
        record_iteration(report, op, b, i, estimate, x_i, x_true)
        logger.debug("fgmres-aug step %d (%s): residual %.6e", i, "v" if i <= m else "w", estimate)

        if step.breakdown:
            if strict and i < m:
                raise BreakdownError(f"Flexible cycle broke down at step {i} of {m} Krylov steps")
            logger.warning("fgmres-aug: breakdown at step %d of %d", i, m + k)
            report.breakdown = True
            break

    y, report.x = materialize()
    krylov_steps = min(report.iterations, m)
    report.krylov_coefficients = y[:krylov_steps]
    report.augmentation_coefficients = y[krylov_steps:]
    report.krylov_basis = state.V(krylov_steps)
    report.converged = residual_estimate(qr) <= tol * r0_norm
    report.matvec_count = op.matvecs - matvecs_before
    logger.info(
        "fgmres-aug cycle finished: %d steps, residual %.6e",
        report.iterations,
        residual_estimate(qr),
    )
    return report
