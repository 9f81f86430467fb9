"""Simplified R³GMRES: augmentation of an unprojected Krylov space.

The Krylov space K_j(A, w0) is built from A itself (w0 = A·r0 by default),
so an inaccurate augmentation space U does not steer it. Minimizing the
residual over U + K_j reduces to a projected problem for y_j,

    (I − M_j·M_jᵀ)·R_j·y_j = {Q_jᵀ·V_{j+1}ᵀ·(I − Φ)·r0}_{1:j},

where M_j = {Q_jᵀ·D_j}_{1:j} and D_j = V_{j+1}ᵀ·C, followed by
z_j = Cᵀr0 − D_jᵀ·H̲_j·y_j. Neither the iterate nor the residual is formed
until a scaled residual bound signals convergence.

Per iteration only D and its rotated copy M are maintained. When an
iterate is needed, C is split against V_{j+1} and the small coupled
least-squares problem is solved by an orthogonal factorization; the
projected j×j system above is available as an alternative and loses
accuracy as ‖M_j‖ approaches 1.
"""

import logging
from dataclasses import dataclass

import numpy as np

from augmented_krylov.config import DEFAULT_MAXIT, DEFAULT_TOL, GAMMA_COOLDOWN, SMALL_SYSTEM_TOL

from .arnoldi import ArnoldiState, arnoldi_init, arnoldi_step
from .augmentation import AugmentationSpace, empty_augmentation
from .exceptions import SingularSystemError, ValidationError
from .gmres import (
    ProgressiveQr,
    record_iteration,
    residual_estimate,
    trivial_report,
    update_progressive_qr,
)
from .linalg import (
    least_squares_with_rank,
    orthogonalize_block,
    solve_triangular_or_least_squares,
)
from .models import GivensPair, IterationRecord, SolveReport
from .operators import CountingOperator

__all__ = [
    "R3State",
    "coupled_cost_per_iteration",
    "r3gmres_reference",
    "r3gmres_solve",
    "residual_estimate",
    "simplified_cost_per_iteration",
    "solve_projected_small_system",
    "update_m_rows",
]

logger = logging.getLogger(__name__)


@dataclass
class R3State:
    """Solver state beyond plain GMRES: D, its rotated copy M, and γ."""

    arnoldi: ArnoldiState
    qr: ProgressiveQr
    D: np.ndarray
    M: np.ndarray
    gamma: float
    s1: np.ndarray
    c_r0: np.ndarray
    space: AugmentationSpace
    r0: np.ndarray


@dataclass
class Solution:
    """One materialized iterate with its coefficients in C and V_j."""

    x: np.ndarray
    z: np.ndarray
    y: np.ndarray
    degenerate: bool


def update_m_rows(M: np.ndarray, rotation: GivensPair, j: int) -> np.ndarray:
    """Rotate rows j and j+1 (0-based) of M in place."""
    M[j], M[j + 1] = rotation.apply(M[j].copy(), M[j + 1].copy())
    return M


def solve_projected_small_system(
    R: np.ndarray,
    M: np.ndarray,
    rhs: np.ndarray,
    tol: float = SMALL_SYSTEM_TOL,
    strict: bool = False,
) -> np.ndarray:
    """Solve (I − M·Mᵀ)·R·y = rhs through the singular values of M.

    With M = U·Σ·Wᵀ, (I − M·Mᵀ)⁻¹ = I + U·diag(σ²/(1 − σ²))·Uᵀ, and 1 − σ² is
    taken as (1 − σ)(1 + σ). Directions with 1 − σ² ≤ ``tol`` make the system
    singular: they are dropped (minimum-norm solution) and logged, or raise
    :class:`SingularSystemError` with ``strict``.
    """
    R = np.atleast_2d(np.asarray(R, dtype=float))
    rhs = np.asarray(rhs, dtype=float)
    w = rhs
    if M.size:
        U, sigma, _ = np.linalg.svd(M, full_matrices=False)
        gap = (1.0 - sigma) * (1.0 + sigma)
        singular = gap <= tol
        if singular.any():
            message = f"Projected small system is singular (1 − ‖M‖² = {gap.min():.3e})"
            if strict:
                raise SingularSystemError(message)
            logger.warning("%s; dropping %d direction(s)", message, int(singular.sum()))
        coupled = U.T @ rhs
        scale = np.where(singular, -1.0, sigma * sigma / np.where(singular, 1.0, gap))
        w = rhs + U @ (scale * coupled)
    return solve_triangular_or_least_squares(R, w)


def simplified_cost_per_iteration(n: int, k: int) -> int:
    """Work beyond GMRES per iteration: one d row (n·k) and the M rotation (2k)."""
    return k * (n + 2)


def coupled_cost_per_iteration(n: int, k: int) -> int:
    """Work beyond GMRES per iteration when C is re-orthogonalized against V every step."""
    return 2 * k * (k * k + k * n + n)


def _solve_orthogonal(state: R3State, j: int) -> tuple[np.ndarray, np.ndarray, bool]:
    """Minimize ‖r0 − V_{j+1}·H̲_j·y − C·z‖ in the basis [V_{j+1}, Q].

    C = V_{j+1}·D + Q·T is recomputed here with two Gram-Schmidt passes, so
    the small matrix [[H̲_j, D], [0, T]] has the conditioning of the coupled
    problem itself.
    """
    V = state.arnoldi.V(j + 1)
    rows = V.shape[1]
    k = state.space.k
    D, Q, T = orthogonalize_block(V, state.space.image)
    theta = np.zeros((rows + k, j + k))
    theta[:rows, :j] = state.arnoldi.hessenberg[:rows]
    theta[:rows, j:] = D
    theta[rows:, j:] = T
    rhs = np.concatenate([V.T @ state.r0, Q.T @ state.r0])
    w, rank = least_squares_with_rank(theta, rhs)
    return w[:j], w[j:], rank < j + k


def _solve_projected(state: R3State, j: int) -> tuple[np.ndarray, np.ndarray, bool]:
    M_j = state.M[:j]
    rhs = state.qr.rhs(j) - M_j @ state.c_r0
    degenerate = bool(M_j.size) and np.linalg.norm(M_j, 2) ** 2 >= 1.0 - SMALL_SYSTEM_TOL
    y = solve_projected_small_system(state.qr.R, M_j, rhs)
    DtHy = state.D[: j + 1].T @ (state.arnoldi.hessenberg @ y)
    return y, state.c_r0 - DtHy, degenerate


def _materialize(
    state: R3State, x0: np.ndarray, j: int, projected_system: bool
) -> Solution:
    """Form x_j, z_j and y_j from the current factorization."""
    if projected_system:
        y, z, degenerate = _solve_projected(state, j)
        x = x0 + state.s1 - state.space.expand(state.c_r0 - z) + state.arnoldi.V(j) @ y
    else:
        y, z, degenerate = _solve_orthogonal(state, j)
        x = x0 + state.space.expand(z) + state.arnoldi.V(j) @ y
    return Solution(x, z, y, degenerate)


def r3gmres_solve(
    operator,
    b: np.ndarray,
    x0: np.ndarray | None = None,
    space: AugmentationSpace | None = None,
    tol: float = DEFAULT_TOL,
    maxit: int = DEFAULT_MAXIT,
    range_restricted: bool = True,
    x_true: np.ndarray | None = None,
    diagnostics: bool = False,
    reorthogonalize: bool = True,
    cooldown: int = GAMMA_COOLDOWN,
    projected_system: bool = False,
    strict: bool = False,
) -> SolveReport:
    """Residual minimization over x0 + U + K_j(A, w0).

    Convergence gate: γ·estimate < tol·‖r0‖, with γ = ‖(I−CCᵀ)r‖/‖r‖ taken
    from the latest explicit residual (r0 at start). When the gate fires the
    iterate and its residual are formed; on a false alarm γ is refreshed and
    the next ``cooldown`` iterations skip the explicit check. Arnoldi
    breakdown and ``maxit`` always end with an explicit solve.

    An iteration whose small problem is numerically singular gets the
    minimum-norm minimizer and is listed in ``report.degenerate_iterations``;
    with ``strict`` it raises :class:`SingularSystemError` instead.
    ``projected_system`` forms iterates from the j×j projected system.
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
        return trivial_report("r3gmres", x0, r0_norm)

    c_r0 = space.coefficients(r0)
    gamma = max(float(np.linalg.norm(r0 - space.image @ c_r0)) / r0_norm, np.finfo(float).eps)
    arnoldi = arnoldi_init(op, r0, range_restricted, reorthogonalize=reorthogonalize)
    D = np.zeros((maxit + 1, k))
    D[0] = space.coefficients(arnoldi.basis[0])
    state = R3State(
        arnoldi=arnoldi,
        qr=ProgressiveQr.start(arnoldi.coefficients[0]),
        D=D,
        M=D.copy(),
        gamma=gamma,
        s1=space.expand(c_r0),
        c_r0=c_r0,
        space=space,
        r0=r0,
    )
    report = SolveReport(
        x=x0.copy(), iterations=0, converged=False, method="r3gmres", r0_norm=r0_norm
    )
    threshold = tol * r0_norm
    next_check = 1
    accepted = None

    def materialize(j: int) -> Solution:
        solution = _materialize(state, x0, j, projected_system)
        if solution.degenerate:
            if strict:
                raise SingularSystemError(
                    f"Small least-squares problem is singular at iteration {j}", iteration=j
                )
            if j not in report.degenerate_iterations:
                report.degenerate_iterations.append(j)
                logger.warning(
                    "r3gmres: small problem numerically singular at iteration %d; "
                    "using the minimum-norm minimizer",
                    j,
                )
        return solution

    for j in range(1, maxit + 1):
        step = arnoldi_step(arnoldi, op)
        if not step.breakdown:
            state.D[j] = space.coefficients(step.vector)
            state.M[j] = state.D[j]
            report.augmentation_flops += space.image.size
        rhs_entry = 0.0 if step.breakdown else arnoldi.coefficients[-1]
        update_progressive_qr(state.qr, step.column, rhs_entry)
        update_m_rows(state.M, state.qr.rotations[-1], j - 1)
        report.augmentation_flops += 2 * state.M.shape[1]
        estimate = residual_estimate(state.qr, arnoldi.complement_norm)
        report.iterations = j

        x_j = materialize(j).x if diagnostics else None
        record_iteration(report, op, b, j, estimate, x_j, x_true)

        gate = state.gamma * estimate < threshold and j >= next_check
        logger.debug(
            "r3gmres iteration %d: estimate %.6e, gamma %.3e, gate=%s",
            j,
            estimate,
            state.gamma,
            gate,
        )
        if not (gate or step.breakdown or j == maxit):
            continue

        accepted = materialize(j)
        r = op.residual(b, accepted.x)
        report.residual_checks += 1
        r_norm = float(np.linalg.norm(r))
        if r_norm < threshold:
            report.converged = True
            break
        if step.breakdown:
            logger.warning("r3gmres: Arnoldi breakdown at iteration %d", j)
            report.breakdown = True
            break
        if gate:
            state.gamma = max(
                float(np.linalg.norm(r - space.image @ space.coefficients(r))) / r_norm,
                np.finfo(float).eps,
            )
            next_check = j + cooldown + 1
            logger.info(
                "r3gmres: false convergence alarm at iteration %d (‖r‖/‖r0‖ = %.3e), "
                "gamma -> %.3e",
                j,
                r_norm / r0_norm,
                state.gamma,
            )

    report.x = accepted.x
    report.augmentation_coefficients = accepted.z
    report.krylov_coefficients = accepted.y
    report.krylov_basis = arnoldi.V(report.iterations)
    report.matvec_count = op.matvecs - matvecs_before
    logger.info(
        "r3gmres finished: %d iterations, %d residual checks, converged=%s",
        report.iterations,
        report.residual_checks,
        report.converged,
    )
    return report


def r3gmres_reference(
    operator,
    b: np.ndarray,
    x0: np.ndarray | None = None,
    space: AugmentationSpace | None = None,
    tol: float = DEFAULT_TOL,
    maxit: int = DEFAULT_MAXIT,
    range_restricted: bool = True,
    x_true: np.ndarray | None = None,
    reorthogonalize: bool = True,
) -> SolveReport:
    """Coupled formulation: least squares over A·[Û V_j] at every iteration.

    Costs O(n·(k+j)²) per iteration; every iterate is formed and kept. Used
    as the oracle for :func:`r3gmres_solve`.
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
        return trivial_report("r3gmres-ref", x0, r0_norm)

    AU = list((space.image @ space.factor).T)
    arnoldi = arnoldi_init(op, r0, range_restricted, reorthogonalize=reorthogonalize)
    products: list[np.ndarray] = []
    report = SolveReport(
        x=x0.copy(), iterations=0, converged=False, method="r3gmres-ref", r0_norm=r0_norm
    )
    coefficients = np.zeros(k)

    for j in range(1, maxit + 1):
        step = arnoldi_step(arnoldi, op)
        products.append(step.product)
        AW = np.column_stack(AU + products)
        coefficients, rank = least_squares_with_rank(AW, r0)
        if rank < AW.shape[1]:
            report.degenerate_iterations.append(j)
        x = x0 + space.basis @ coefficients[:k] + arnoldi.V(j) @ coefficients[k:]
        r_norm = float(np.linalg.norm(r0 - AW @ coefficients))
        report.iterations = j

        record = IterationRecord(
            iteration=j,
            residual_estimate=r_norm,
            true_residual=float(np.linalg.norm(op.residual(b, x, count=False))),
        )
        if x_true is not None:
            record.relative_error = float(np.linalg.norm(x - x_true) / np.linalg.norm(x_true))
            report.track_best(j, record.relative_error, x)
        report.history.append(record)
        report.iterates.append(x)

        if r_norm < tol * r0_norm:
            report.converged = True
            break
        if step.breakdown:
            report.breakdown = True
            break

    report.x = report.iterates[-1].copy()
    report.augmentation_coefficients = space.factor @ coefficients[:k]
    report.krylov_coefficients = coefficients[k:]
    report.krylov_basis = arnoldi.V(report.iterations)
    report.matvec_count = op.matvecs - matvecs_before
    return report
