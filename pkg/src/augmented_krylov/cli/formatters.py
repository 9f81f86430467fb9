from augmented_krylov.core.models import ComparisonTable, SolveReport


def _number(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.6e}"


class CLIFormatter:
    """Formats solve results for CLI output."""

    @staticmethod
    def format_summary(report: SolveReport) -> str:
        """One-line summary: method, iterations, errors and work counters."""
        best = _number(report.best_error)
        if report.best_error_iteration is not None:
            best += f" (iteration {report.best_error_iteration})"
        parts = [
            f"method={report.method}",
            f"iterations={report.iterations}",
            f"converged={'yes' if report.converged else 'no'}",
            f"final_error={_number(report.final_relative_error)}",
            f"best_error={best}",
            f"matvecs={report.matvec_count}",
        ]
        if report.augmentation_flops:
            parts.append(f"aug_flops={report.augmentation_flops}")
        if report.residual_checks:
            parts.append(f"residual_checks={report.residual_checks}")
        if report.breakdown:
            parts.append("breakdown=yes")
        if report.degenerate_iterations:
            parts.append(f"degenerate={len(report.degenerate_iterations)}")
        return " ".join(parts)

    @staticmethod
    def format_comparison(table: ComparisonTable) -> str:
        """One summary line per compared run, prefixed with its column label."""
        lines = []
        for label, report in zip(table.labels, table.reports, strict=True):
            lines.append(f"{label}: {CLIFormatter.format_summary(report)}")
        return "\n".join(lines)

    @staticmethod
    def format_success(message: str) -> str:
        """Format a success message."""
        return f"✓ {message}"

    @staticmethod
    def format_error(message: str) -> str:
        """Format an error message."""
        return f"✗ Error: {message}"
