"""Incremental Arnoldi process (modified Gram-Schmidt).

Maintains A·V_j = V_{j+1}·H̲_j for the plain space K_j(A, r0) or the
range-restricted space K_j(A, A·r0). In range-restricted mode the part of
r0 outside span(V_{j+1}) is tracked progressively, since it enters the
residual bound.
"""

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from augmented_krylov.config import BREAKDOWN_TOL

from .exceptions import SolverError, ZeroStartError
from .ports import LinearOperator

logger = logging.getLogger(__name__)


class ArnoldiStep(NamedTuple):
    column: np.ndarray
    vector: np.ndarray | None
    product: np.ndarray
    breakdown: bool


@dataclass
class ArnoldiState:
    """Orthonormal basis V and Hessenberg columns of one Arnoldi run."""

    basis: list[np.ndarray]
    beta: float
    range_restricted: bool
    coefficients: list[float]
    complement: np.ndarray
    complement_norm: float = 0.0
    columns: list[np.ndarray] = field(default_factory=list)
    reorthogonalize: bool = True
    breakdown_tol: float = BREAKDOWN_TOL
    breakdown: bool = False

    @property
    def steps(self) -> int:
        return len(self.columns)

    def V(self, count: int | None = None) -> np.ndarray:
        """First ``count`` basis vectors as columns (all of them by default)."""
        vectors = self.basis if count is None else self.basis[:count]
        if not vectors:
            return np.zeros((self.complement.shape[0], 0))
        return np.column_stack(vectors)

    @property
    def hessenberg(self) -> np.ndarray:
        """H̲_j, shape (j+1)×j."""
        j = self.steps
        H = np.zeros((j + 1, j))
        for col, values in enumerate(self.columns):
            H[: values.shape[0], col] = values
        return H

    @property
    def rhs_coefficients(self) -> np.ndarray:
        """V_{j+1}ᵀ·r0 (β·e1 in plain mode)."""
        return np.array(self.coefficients)


def arnoldi_init(
    operator: LinearOperator,
    r0: np.ndarray,
    range_restricted: bool = False,
    start: np.ndarray | None = None,
    reorthogonalize: bool = True,
    breakdown_tol: float = BREAKDOWN_TOL,
) -> ArnoldiState:
    """Start an Arnoldi run from w0 = r0 (plain) or w0 = A·r0 (range-restricted).

    ``start`` overrides w0; projected methods pass their projected start
    vector here.
    """
    r0 = np.asarray(r0, dtype=float)
    beta = float(np.linalg.norm(r0))
    if beta == 0.0:
        raise ZeroStartError("Initial residual is zero")

    if start is not None:
        w0 = np.asarray(start, dtype=float)
    elif range_restricted:
        w0 = operator.matvec(r0)
    else:
        w0 = r0
    w0_norm = float(np.linalg.norm(w0))
    if w0_norm <= breakdown_tol * beta:
        raise ZeroStartError(
            f"Arnoldi start vector vanishes (‖w0‖ = {w0_norm:.3e}); "
            "r0 lies in the null space of the operator"
        )

    v1 = w0 / w0_norm
    if range_restricted:
        g1 = float(v1 @ r0)
        complement = r0 - g1 * v1
        complement_norm = float(np.linalg.norm(complement))
    else:
        g1 = beta
        complement = np.zeros_like(r0)
        complement_norm = 0.0

    return ArnoldiState(
        basis=[v1],
        beta=beta,
        range_restricted=range_restricted,
        coefficients=[g1],
        complement=complement,
        complement_norm=complement_norm,
        reorthogonalize=reorthogonalize,
        breakdown_tol=breakdown_tol,
    )


def arnoldi_step(
    state: ArnoldiState, operator: LinearOperator, vector: np.ndarray | None = None
) -> ArnoldiStep:
    """One matvec plus MGS orthogonalization; appends a column of H̲.

    The product is A·v_j unless ``vector`` is given (flexible variants pass
    their own direction). On breakdown the column is still recorded but no
    basis vector is added.
    """
    if state.breakdown:
        raise SolverError("Arnoldi process already broke down")

    w = operator.matvec(state.basis[-1] if vector is None else vector)
    product = w.copy()
    w_norm = float(np.linalg.norm(w))

    h = np.zeros(len(state.basis) + 1)
    for i, v in enumerate(state.basis):
        h[i] = v @ w
        w -= h[i] * v
    if state.reorthogonalize:
        for i, v in enumerate(state.basis):
            correction = v @ w
            h[i] += correction
            w -= correction * v

    h[-1] = float(np.linalg.norm(w))
    state.columns.append(h)

    if w_norm == 0.0 or h[-1] <= state.breakdown_tol * w_norm:
        state.breakdown = True
        logger.debug("Arnoldi breakdown at step %d (h = %.3e)", state.steps, h[-1])
        return ArnoldiStep(h, None, product, True)

    v_new = w / h[-1]
    state.basis.append(v_new)
    if state.range_restricted:
        g = float(v_new @ state.complement)
        state.complement -= g * v_new
        state.complement_norm = float(np.linalg.norm(state.complement))
        state.coefficients.append(g)
    else:
        state.coefficients.append(0.0)

    return ArnoldiStep(h, v_new, product, False)
