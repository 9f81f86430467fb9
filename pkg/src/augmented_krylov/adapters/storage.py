import csv
from collections.abc import Sequence
from numbers import Integral
from pathlib import Path

import numpy as np

from augmented_krylov.config import CSV_COLUMNS, CSV_DIGITS
from augmented_krylov.core.exceptions import ValidationError
from augmented_krylov.core.models import IterationRecord

NUMBER_FORMAT = f".{CSV_DIGITS}g"


def format_value(value) -> str:
    """Render a CSV field: empty for None, integers as-is, floats with 17 digits."""
    if value is None:
        return ""
    if isinstance(value, Integral):
        return str(int(value))
    return format(float(value), NUMBER_FORMAT)


class CsvResultsStore:
    """Filesystem results store: CSV histories and the text matrix format."""

    def write_history(self, path: Path, history: Sequence[IterationRecord]) -> None:
        rows = [
            [rec.iteration, rec.residual_estimate, rec.true_residual, rec.relative_error]
            for rec in history
        ]
        self.write_table(path, CSV_COLUMNS, rows)

    def write_table(self, path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_value(value) for value in row])

    def write_matrix(self, path: Path, matrix: np.ndarray) -> None:
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim == 1:
            matrix = matrix[:, None]
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            f.write(f"{matrix.shape[0]} {matrix.shape[1]}\n")
            for row in matrix:
                f.write(" ".join(format(value, NUMBER_FORMAT) for value in row) + "\n")

    def read_matrix(self, path: Path) -> np.ndarray:
        """Read a file written by :meth:`write_matrix`."""
        with open(path, encoding="utf-8") as f:
            tokens = f.read().split()
        try:
            rows, cols = int(tokens[0]), int(tokens[1])
            values = np.array([float(token) for token in tokens[2:]])
        except (IndexError, ValueError) as e:
            raise ValidationError(f"{path} is not a text matrix file: {e}") from e
        if values.size != rows * cols:
            raise ValidationError(
                f"{path} declares {rows}x{cols} entries but holds {values.size}"
            )
        return values.reshape(rows, cols)
