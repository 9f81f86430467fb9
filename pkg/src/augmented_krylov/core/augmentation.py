"""Augmentation space U and the projectors associated with it.

With A·Û = C·F (thin QR), Φ = C·Cᵀ is the orthogonal projector onto A·U.
The raw basis Û is kept as supplied: an expansion U·z is evaluated as
Û·(F⁻¹·z) instead of storing Û·F⁻¹.
"""

import logging
from dataclasses import dataclass

import numpy as np

from augmented_krylov.config import RANK_TOL

from .exceptions import RankDeficiencyError, ValidationError
from .linalg import back_substitute, thin_qr
from .operators import CountingOperator

logger = logging.getLogger(__name__)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class AugmentationSpace:
    """Raw basis Û (n×k), orthonormal image C (n×k) and triangular F (k×k)."""

    basis: np.ndarray
    image: np.ndarray
    factor: np.ndarray

    @property
    def k(self) -> int:
        return self.basis.shape[1]

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    def coefficients(self, v: np.ndarray) -> np.ndarray:
        """Cᵀ·v."""
        return self.image.T @ v

    def expand(self, z: np.ndarray) -> np.ndarray:
        """Û·(F⁻¹·z)."""
        if self.k == 0:
            return np.zeros(self.n)
        return self.basis @ back_substitute(self.factor, z)


def empty_augmentation(n: int) -> AugmentationSpace:
    return AugmentationSpace(
        basis=_frozen(np.zeros((n, 0))),
        image=_frozen(np.zeros((n, 0))),
        factor=_frozen(np.zeros((0, 0))),
    )


def build_augmentation(
    operator, basis: np.ndarray | None, rank_tol: float = RANK_TOL
) -> AugmentationSpace:
    """Thin QR of A·Û; costs k matrix-vector products."""
    op = CountingOperator.wrap(operator)
    if basis is None:
        return empty_augmentation(op.n)

    basis = np.asarray(basis, dtype=float)
    if basis.ndim == 1:
        basis = basis[:, None]
    if basis.shape[0] != op.n:
        raise ValidationError(
            f"Augmentation basis has {basis.shape[0]} rows, operator has dimension {op.n}"
        )
    if basis.shape[1] == 0:
        return empty_augmentation(op.n)

    images = np.column_stack([op.matvec(basis[:, i]) for i in range(basis.shape[1])])
    try:
        C, F = thin_qr(images, rank_tol=rank_tol)
    except RankDeficiencyError as e:
        raise RankDeficiencyError(
            f"Augmentation vectors are redundant after applying A: {e}"
        ) from e

    logger.debug("Built augmentation space with k=%d, cond(F)=%.3e", F.shape[0], np.linalg.cond(F))
    return AugmentationSpace(basis=_frozen(basis), image=_frozen(C), factor=_frozen(F))


def apply_phi_complement(space: AugmentationSpace, v: np.ndarray) -> np.ndarray:
    """(I − C·Cᵀ)·v."""
    if space.k == 0:
        return np.array(v, dtype=float)
    return v - space.image @ (space.image.T @ v)


def apply_pi_to_error(space: AugmentationSpace, r0: np.ndarray) -> np.ndarray:
    """s1 = Û·(F⁻¹·(Cᵀ·r0)), the action of Π on the initial error.

    Uses only r0 = A·η0; satisfies A·s1 = C·Cᵀ·r0.
    """
    return space.expand(space.coefficients(r0))
