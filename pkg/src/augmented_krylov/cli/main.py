from pathlib import Path

import click

from augmented_krylov.adapters.storage import CsvResultsStore
from augmented_krylov.cli.commands.compare import compare
from augmented_krylov.cli.commands.export import export_problem
from augmented_krylov.cli.commands.run import run
from augmented_krylov.config import get_log_file_path
from augmented_krylov.core.services import ExperimentService
from augmented_krylov.logging_config import setup_logging

# Dependency Injection / Bootstrap
_store = CsvResultsStore()
_service = ExperimentService(_store)


@click.group()
@click.version_option(package_name="augmented-krylov")
@click.option(
    "-v",
    "--verbose",
    count=True,
    help="Increase verbosity (-v summaries, -vv solver iterations, -vvv everything)",
)
@click.option(
    "--log-dir",
    type=click.Path(file_okay=False, path_type=Path),
    help=f"Directory for the log file (default: {get_log_file_path()})",
)
@click.pass_context
def cli(ctx, verbose, log_dir):
    """Augmented Krylov solver experiments for discrete ill-posed problems."""
    # A failed logging setup is reported on stderr; experiments still run
    setup_logging(verbosity=verbose, log_dir=log_dir)
    ctx.obj = _service


cli.add_command(run)
cli.add_command(compare)
cli.add_command(export_problem)

if __name__ == "__main__":
    cli()
