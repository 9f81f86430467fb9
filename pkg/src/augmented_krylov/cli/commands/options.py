from pathlib import Path

import click

from augmented_krylov.core.models import AugKind, Method, ProblemKind


def _choices(enum) -> click.Choice:
    return click.Choice([member.value for member in enum])


def problem_options(command):
    """Options that define the linear system (shared by `run` and `export-problem`)."""
    for option in reversed(
        [
            click.option("--problem", type=_choices(ProblemKind), help="Test problem"),
            click.option("--n", "n", type=int, help="Problem size"),
            click.option("--noise", type=float, help="Relative noise level"),
            click.option("--seed", type=int, help="Noise seed"),
            click.option("--depth", type=float, help="Gravity source depth"),
            click.option(
                "--discontinuity",
                type=float,
                help="Location of the true jump for gravity problems",
            ),
        ]
    ):
        command = option(command)
    return command


def solver_options(command):
    """Options that select and tune the solver."""
    for option in reversed(
        [
            click.option("--method", type=_choices(Method), help="Solver"),
            click.option("--tol", type=float, help="Relative residual tolerance"),
            click.option("--maxit", type=int, help="Maximum number of iterations"),
            click.option("--aug", type=_choices(AugKind), help="Augmentation basis"),
            click.option("--jump-index", type=int, help="1-based start of the step basis"),
            click.option("--plain", is_flag=True, help="Start the Krylov space from r0"),
            click.option(
                "--strict",
                is_flag=True,
                help="Fail on a degenerate R3GMRES step instead of taking the minimum-norm one",
            ),
            click.option(
                "--diagnostics/--no-diagnostics",
                default=None,
                help="Record true residuals and errors at every iteration",
            ),
            click.option(
                "--out",
                type=click.Path(dir_okay=False, path_type=Path),
                help="CSV file for the per-iteration history",
            ),
        ]
    ):
        command = option(command)
    return command


def collect(**values) -> dict:
    """Drop unset options so configuration defaults apply."""
    return {key: value for key, value in values.items() if value is not None}
