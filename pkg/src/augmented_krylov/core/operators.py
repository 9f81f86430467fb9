import numpy as np
from scipy.sparse.linalg import aslinearoperator

from .exceptions import ValidationError


class CountingOperator:
    """LinearOperator adapter that counts matrix-vector products.

    Wraps anything scipy's ``aslinearoperator`` accepts (dense arrays,
    sparse matrices, scipy LinearOperators). Products requested with
    ``count=False`` are diagnostic and do not enter the tally.
    """

    def __init__(self, operator):
        self._op = aslinearoperator(operator)
        rows, cols = self._op.shape
        if rows != cols:
            raise ValidationError(f"Operator must be square, got shape {self._op.shape}")
        self.matvecs = 0

    @classmethod
    def wrap(cls, operator) -> "CountingOperator":
        """Reuse an existing counter so callers see one shared tally."""
        if isinstance(operator, cls):
            return operator
        return cls(operator)

    @property
    def shape(self) -> tuple[int, int]:
        return self._op.shape

    @property
    def n(self) -> int:
        return self._op.shape[0]

    def matvec(self, v: np.ndarray, count: bool = True) -> np.ndarray:
        if count:
            self.matvecs += 1
        return np.asarray(self._op.matvec(v), dtype=float).reshape(-1)

    def residual(self, b: np.ndarray, x: np.ndarray, count: bool = True) -> np.ndarray:
        """b − A·x; skips the product when x is zero."""
        if not np.any(x):
            return np.array(b, dtype=float)
        return b - self.matvec(x, count=count)
