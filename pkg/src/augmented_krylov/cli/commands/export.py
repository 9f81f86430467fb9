from pathlib import Path

import click

from augmented_krylov.adapters.dtos import parse_experiment_config
from augmented_krylov.cli.commands.options import collect, problem_options
from augmented_krylov.cli.formatters import CLIFormatter
from augmented_krylov.cli.utils import handle_exception


@click.command(name="export-problem")
@problem_options
@click.option(
    "--out-dir",
    required=True,
    type=click.Path(file_okay=False, path_type=Path),
    help="Directory for A.txt, x_true.txt, b_true.txt and b_noisy.txt",
)
@click.pass_obj
def export_problem(service, problem, n, noise, seed, depth, discontinuity, out_dir):
    """Write a test problem in the text matrix format."""
    try:
        config = parse_experiment_config(
            collect(
                problem=problem,
                n=n,
                noise_level=noise,
                seed=seed,
                depth=depth,
                discontinuity=discontinuity,
            )
        )
        paths = service.export_problem(config, out_dir)
        click.echo(CLIFormatter.format_success(f"Wrote {len(paths)} files to {out_dir}"))
    except Exception as e:
        handle_exception(e)
