import logging
from collections import Counter
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from augmented_krylov.config import CSV_COLUMNS, DEFAULT_DISCONTINUITY, DIAGNOSTICS_MAX_N

from .augmentation import build_augmentation
from .exceptions import ValidationError
from .flexible import fgmres_augmented_cycle
from .gmres import gmres_solve
from .models import (
    AugKind,
    ComparisonTable,
    ExperimentConfig,
    Method,
    ProblemKind,
    SolveReport,
    TestProblem,
)
from .operators import CountingOperator
from .ports import ResultsStore
from .problems import aug_basis_boundary, aug_basis_step, build_problem, jump_index_for
from .projected import gcro_solve
from .r3gmres import r3gmres_reference, r3gmres_solve

logger = logging.getLogger(__name__)

RANGE_RESTRICTED_METHODS = {Method.RRGMRES, Method.R3GMRES, Method.R3GMRES_REF}
AUGMENTED_METHODS = {Method.R3GMRES, Method.R3GMRES_REF, Method.GCRO, Method.FGMRES_AUG}


def diagnostics_enabled(config: ExperimentConfig) -> bool:
    """Explicit setting, else on for problems up to DIAGNOSTICS_MAX_N unknowns."""
    if config.diagnostics is not None:
        return config.diagnostics
    return config.n <= DIAGNOSTICS_MAX_N


def default_jump_index(config: ExperimentConfig) -> int:
    """Jump index of the step basis when the config leaves it open.

    For the mislocated problem the step stays at t = 1/2 while the true jump
    moves, so the basis encodes the wrong location.
    """
    if config.jump_index is not None:
        return config.jump_index
    tau = DEFAULT_DISCONTINUITY
    if config.problem == ProblemKind.GRAVITY and config.discontinuity is not None:
        tau = config.discontinuity
    return jump_index_for(config.n, tau)


def augmentation_basis(config: ExperimentConfig) -> np.ndarray | None:
    if config.aug == AugKind.BOUNDARY:
        return aug_basis_boundary(config.n)
    if config.aug == AugKind.STEP:
        return aug_basis_step(config.n, default_jump_index(config))
    return None


def windowed_error(
    x: np.ndarray, x_true: np.ndarray, center_index: int, half_width: int
) -> float:
    """‖(x − x_true) restricted to a window‖ / ‖x_true‖.

    The window covers 1-based indices center_index ± half_width, clipped to
    the grid.
    """
    n = x_true.shape[0]
    if not 1 <= center_index <= n:
        raise ValidationError(f"Window center must lie in [1, {n}], got {center_index}")
    if half_width < 0:
        raise ValidationError(f"Window half-width must be non-negative, got {half_width}")
    lo = max(center_index - 1 - half_width, 0)
    hi = min(center_index + half_width, n)
    return float(np.linalg.norm((x - x_true)[lo:hi]) / np.linalg.norm(x_true))


def history_rows(report: SolveReport) -> list[list]:
    return [
        [rec.iteration, rec.residual_estimate, rec.true_residual, rec.relative_error]
        for rec in report.history
    ]


def _unique_labels(configs: Sequence[ExperimentConfig]) -> list[str]:
    seen: Counter[str] = Counter()
    labels = []
    for config in configs:
        seen[config.label] += 1
        count = seen[config.label]
        labels.append(config.label if count == 1 else f"{config.label}#{count}")
    return labels


class ExperimentService:
    """Runs configured solver experiments and persists their histories."""

    def __init__(self, store: ResultsStore):
        self.store = store

    def solve(self, config: ExperimentConfig, problem: TestProblem) -> SolveReport:
        """Run the configured method on an already built problem."""
        if config.aug != AugKind.NONE and config.method not in AUGMENTED_METHODS:
            raise ValidationError(
                f"Method {config.method.value} does not take an augmentation space"
            )

        op = CountingOperator(problem.A)
        diagnostics = diagnostics_enabled(config)
        range_restricted = config.method in RANGE_RESTRICTED_METHODS and not config.plain
        basis = augmentation_basis(config)
        common = dict(tol=config.tol, x_true=problem.x_true)
        b = problem.b_noisy

        if config.method in (Method.GMRES, Method.RRGMRES):
            report = gmres_solve(
                op,
                b,
                maxit=config.maxit,
                range_restricted=range_restricted,
                diagnostics=diagnostics,
                **common,
            )
        elif config.method == Method.FGMRES_AUG:
            report = fgmres_augmented_cycle(
                op, b, None, basis, config.maxit, diagnostics=diagnostics, **common
            )
        else:
            space = build_augmentation(op, basis)
            if config.method == Method.GCRO:
                report = gcro_solve(
                    op, b, space=space, maxit=config.maxit, diagnostics=diagnostics, **common
                )
            elif config.method == Method.R3GMRES:
                report = r3gmres_solve(
                    op,
                    b,
                    space=space,
                    maxit=config.maxit,
                    range_restricted=range_restricted,
                    strict=config.strict,
                    diagnostics=diagnostics,
                    **common,
                )
            else:
                report = r3gmres_reference(
                    op,
                    b,
                    space=space,
                    maxit=config.maxit,
                    range_restricted=range_restricted,
                    **common,
                )

        report.method = config.label
        report.matvec_count = op.matvecs
        return report

    def run_experiment(self, config: ExperimentConfig) -> SolveReport:
        """Build the problem, solve, and write the history CSV if an output path is set."""
        problem = build_problem(config)
        report = self.solve(config, problem)
        logger.info(
            "%s on %s (n=%d): %d iterations, %d matvecs",
            config.label,
            problem.name,
            config.n,
            report.iterations,
            report.matvec_count,
        )
        if config.output_path is not None:
            self.store.write_history(config.output_path, report.history)
        return report

    def compare_methods(
        self, configs: Sequence[ExperimentConfig], output_path: Path | None = None
    ) -> ComparisonTable:
        """Run several methods on one problem and join their histories by iteration."""
        if not configs:
            raise ValidationError("No configurations to compare")
        key = configs[0].problem_key()
        for config in configs[1:]:
            if config.problem_key() != key:
                raise ValidationError(
                    f"Configurations define different problems: {key} vs {config.problem_key()}"
                )

        problem = build_problem(configs[0])
        labels = _unique_labels(configs)
        reports = []
        for config in configs:
            report = self.solve(config, problem)
            if config.output_path is not None:
                self.store.write_history(config.output_path, report.history)
            reports.append(report)

        header = ["iteration"] + [
            f"{label}:{column}" for label in labels for column in CSV_COLUMNS[1:]
        ]
        histories = [history_rows(report) for report in reports]
        length = max(len(history) for history in histories)
        rows = []
        for i in range(length):
            row: list = [i + 1]
            for history in histories:
                row.extend(history[i][1:] if i < len(history) else [None, None, None])
            rows.append(row)

        if output_path is not None:
            self.store.write_table(output_path, header, rows)
        return ComparisonTable(labels=labels, reports=reports, header=header, rows=rows)

    def export_problem(self, config: ExperimentConfig, directory: Path) -> list[Path]:
        """Write A, x_true, b_true and b_noisy in the text matrix format."""
        problem = build_problem(config)
        directory = Path(directory)
        written = []
        for name, matrix in (
            ("A", problem.A),
            ("x_true", problem.x_true),
            ("b_true", problem.b_true),
            ("b_noisy", problem.b_noisy),
        ):
            path = directory / f"{name}.txt"
            self.store.write_matrix(path, matrix)
            written.append(path)
        logger.info("Exported %s (n=%d) to %s", problem.name, config.n, directory)
        return written
