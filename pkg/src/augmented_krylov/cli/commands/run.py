import click

from augmented_krylov.adapters.dtos import parse_experiment_config
from augmented_krylov.cli.commands.options import collect, problem_options, solver_options
from augmented_krylov.cli.formatters import CLIFormatter
from augmented_krylov.cli.utils import handle_exception


@click.command()
@problem_options
@solver_options
@click.pass_obj
def run(
    service,
    problem,
    n,
    noise,
    seed,
    depth,
    discontinuity,
    method,
    tol,
    maxit,
    aug,
    jump_index,
    plain,
    strict,
    diagnostics,
    out,
):
    """Run one solver on one test problem."""
    try:
        config = parse_experiment_config(
            collect(
                problem=problem,
                n=n,
                noise_level=noise,
                seed=seed,
                depth=depth,
                discontinuity=discontinuity,
                method=method,
                tol=tol,
                maxit=maxit,
                aug=aug,
                jump_index=jump_index,
                plain=plain,
                strict=strict,
                diagnostics=diagnostics,
                output_path=out,
            )
        )
        report = service.run_experiment(config)
        click.echo(CLIFormatter.format_summary(report))
        if config.output_path is not None:
            click.echo(CLIFormatter.format_success(f"History written to {config.output_path}"))
    except Exception as e:
        handle_exception(e)
