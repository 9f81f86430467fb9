"""Dense primitives shared by the Krylov solvers.

Matrices are numpy arrays in their default row-major (C) order; basis
vectors are stored as columns.
"""

import logging
import math

import numpy as np
import scipy.linalg

from augmented_krylov.config import RANK_TOL

from .exceptions import RankDeficiencyError, SingularSystemError
from .models import GivensPair

logger = logging.getLogger(__name__)

# Relative diagonal threshold below which a triangular factor is treated as singular.
TRIANGULAR_TOL = 1e-14


def givens_rotation(a: float, b: float) -> tuple[GivensPair, float]:
    """Rotation annihilating b against a.

    Returns (G, r) with c·a + s·b = r and −s·a + c·b = 0. The cosine is
    kept non-negative so factors are reproducible; r takes the sign of a
    (r = |b| when a = 0). A zero b yields the identity.
    """
    if b == 0.0:
        return GivensPair.identity(), float(a)
    if a == 0.0:
        return GivensPair(0.0, math.copysign(1.0, b)), abs(float(b))
    r = math.copysign(math.hypot(a, b), a)
    return GivensPair(a / r, b / r), r


def thin_qr(M: np.ndarray, rank_tol: float = RANK_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Economy QR with a positive diagonal in R.

    Raises RankDeficiencyError when a diagonal entry of R falls below
    ``rank_tol·‖M‖_F``.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    rows, cols = M.shape
    if rows < cols:
        raise RankDeficiencyError(f"thin_qr needs rows >= cols, got {M.shape}")
    if cols == 0:
        return np.zeros((rows, 0)), np.zeros((0, 0))

    Q, R = scipy.linalg.qr(M, mode="economic")
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    Q = Q * signs
    R = R * signs[:, None]

    threshold = rank_tol * np.linalg.norm(M, "fro")
    weak = np.flatnonzero(np.abs(np.diag(R)) <= threshold)
    if weak.size:
        raise RankDeficiencyError(
            f"Matrix is numerically rank-deficient: |R[{weak[0]}, {weak[0]}]| <= {threshold:.3e}"
        )
    return Q, R


def back_substitute(R: np.ndarray, rhs: np.ndarray, tol: float = TRIANGULAR_TOL) -> np.ndarray:
    """Solve R·y = rhs for upper-triangular R."""
    R = np.atleast_2d(np.asarray(R, dtype=float))
    rhs = np.asarray(rhs, dtype=float)
    if R.shape[0] == 0:
        return np.zeros(0)

    diag = np.abs(np.diag(R))
    threshold = tol * diag.max() if diag.max() > 0 else 0.0
    bad = np.flatnonzero(diag <= threshold)
    if bad.size:
        raise SingularSystemError(
            f"Triangular factor is singular: |R[{bad[0]}, {bad[0]}]| = {diag[bad[0]]:.3e}"
        )
    return scipy.linalg.solve_triangular(R, rhs, lower=False)


def dense_least_squares(
    M: np.ndarray, rhs: np.ndarray, rcond: float | None = None, strict: bool = False
) -> np.ndarray:
    """Minimum-norm minimizer of ‖M·y − rhs‖ via the SVD-based LAPACK driver.

    Rank deficiency is logged; with ``strict`` it raises instead.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    y, rank = least_squares_with_rank(M, rhs, rcond)
    if rank < M.shape[1]:
        message = f"Least-squares matrix {M.shape} has numerical rank {rank}"
        if strict:
            raise RankDeficiencyError(message)
        logger.warning("%s; returning minimum-norm solution", message)
    return y


def solve_triangular_or_least_squares(
    R: np.ndarray, rhs: np.ndarray, tol: float = TRIANGULAR_TOL
) -> np.ndarray:
    """Back substitution, or the truncated minimum-norm solution when R is degenerate.

    Diagonal entries at or below ``tol·max|R_ii|`` mark R as degenerate; the
    fallback drops singular values below the same relative cutoff.
    """
    try:
        return back_substitute(R, rhs, tol)
    except SingularSystemError as e:
        logger.debug("%s; falling back to least squares", e)
        return least_squares_with_rank(R, rhs, rcond=tol)[0]


def least_squares_with_rank(
    M: np.ndarray, rhs: np.ndarray, rcond: float | None = None
) -> tuple[np.ndarray, int]:
    """Minimum-norm minimizer of ‖M·y − rhs‖ and the numerical rank of M."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[1] == 0:
        return np.zeros(0), 0
    y, _, rank, _ = scipy.linalg.lstsq(M, rhs, cond=rcond, lapack_driver="gelsd")
    return y, int(rank)


def orthogonalize_block(
    V: np.ndarray, C: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split C = V·D + Q·T with Q orthonormal and orthogonal to the columns of V.

    V must have orthonormal columns. Classical Gram-Schmidt is applied twice,
    then the remainder is factored by Householder QR. T may be tiny or
    singular when C nearly lies in span(V); it is returned as computed.
    """
    D = V.T @ C
    rest = C - V @ D
    again = V.T @ rest
    rest -= V @ again
    D += again
    if C.shape[1] == 0:
        return D, np.zeros((C.shape[0], 0)), np.zeros((0, 0))
    Q, T = scipy.linalg.qr(rest, mode="economic")
    return D, Q, T
