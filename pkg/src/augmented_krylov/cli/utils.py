import click
from pydantic import ValidationError as PydanticValidationError

from augmented_krylov.cli.formatters import CLIFormatter
from augmented_krylov.core.exceptions import SolverError, ValidationError

EXIT_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_SOLVER_ERROR = 3


def handle_exception(e: Exception):
    """Echo a user-friendly message and exit with the code for the error class."""
    if isinstance(e, ValidationError):
        click.echo(CLIFormatter.format_error(str(e)), err=True)
        code = EXIT_CONFIG_ERROR
    elif isinstance(e, PydanticValidationError):
        click.echo(CLIFormatter.format_error(f"Invalid configuration: {e}"), err=True)
        code = EXIT_CONFIG_ERROR
    elif isinstance(e, SolverError):
        iteration = getattr(e, "iteration", None)
        where = f" (iteration {iteration})" if iteration is not None else ""
        click.echo(CLIFormatter.format_error(f"Solver failed{where}: {e}"), err=True)
        code = EXIT_SOLVER_ERROR
    else:
        click.echo(CLIFormatter.format_error(str(e)), err=True)
        code = EXIT_FAILURE
    raise click.exceptions.Exit(code)
