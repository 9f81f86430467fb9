from pathlib import Path

import click

from augmented_krylov.adapters.dtos import load_comparison_file
from augmented_krylov.cli.formatters import CLIFormatter
from augmented_krylov.cli.utils import handle_exception


@click.command()
@click.argument("config_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    help="CSV file for the joined per-iteration table",
)
@click.pass_obj
def compare(service, config_file, out):
    """Run every configuration in CONFIG_FILE on the same problem and join the histories."""
    try:
        configs = load_comparison_file(config_file)
        table = service.compare_methods(configs, out)
        click.echo(CLIFormatter.format_comparison(table))
        if out is not None:
            click.echo(CLIFormatter.format_success(f"Comparison written to {out}"))
    except Exception as e:
        handle_exception(e)
