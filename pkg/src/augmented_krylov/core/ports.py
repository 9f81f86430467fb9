from collections.abc import Sequence
from pathlib import Path
from typing import Protocol

import numpy as np

from .models import IterationRecord


class LinearOperator(Protocol):
    """Square real operator, accessed only through matrix-vector products."""

    @property
    def shape(self) -> tuple[int, int]:
        """(n, n)."""
        ...

    def matvec(self, v: np.ndarray) -> np.ndarray:
        """
        Apply the operator.

        Args:
            v: Vector of length n

        Returns:
            A·v as a 1-D array of length n
        """
        ...


class ResultsStore(Protocol):
    """Protocol for persisting experiment output."""

    def write_history(self, path: Path, history: Sequence[IterationRecord]) -> None:
        """
        Write one run's per-iteration history as CSV.

        Args:
            path: Destination file
            history: Records in iteration order

        Raises:
            OSError: If the file cannot be written
        """
        ...

    def write_table(self, path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
        """
        Write a joined comparison table as CSV.

        Args:
            path: Destination file
            header: Column names
            rows: Row values; None renders as an empty field

        Raises:
            OSError: If the file cannot be written
        """
        ...

    def write_matrix(self, path: Path, matrix: np.ndarray) -> None:
        """
        Write a matrix (or vector, as one column) in the text matrix format.

        Args:
            path: Destination file
            matrix: 1-D or 2-D array

        Raises:
            OSError: If the file cannot be written
        """
        ...
