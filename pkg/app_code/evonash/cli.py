"""Command-line entry point.

Exit codes: 0 ok, 2 configuration error, 3 data error, 4 internal error.
"""
import logging
import sys

import click

from evonash import init_app
from evonash.errors import EvoNashError

# Set up logging
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 4


def _execute(ctx, workflow, data):
    """Run a workflow and translate failures into exit codes"""
    from evonash.agents import orchestrator

    orchestrator.settings = ctx.obj['settings']
    try:
        return orchestrator.execute_workflow(workflow, data)
    except EvoNashError as e:
        click.echo(f"error: {e}", err=True)
        ctx.exit(e.exit_code)
    except Exception as e:
        logger.exception(f"Unexpected failure in {workflow}")
        click.echo(f"internal error: {e}", err=True)
        ctx.exit(EXIT_INTERNAL)


def _echo_summary(result):
    click.echo(f"bundle: {result['bundle']}")
    click.echo(f"hash:   {result['bundle_hash']}")
    for key in ('n_windows', 'MeanExSharpe', 'StdExSharpe', 'RobustScore', 'MeanBeta', 'PosRatio'):
        click.echo(f"{key}: {result['summary'][key]}")


def _parse_params(values):
    params = {}
    for item in values:
        key, sep, value = item.partition('=')
        if not sep:
            raise click.BadParameter(f"expected key=value, got '{item}'", param_hint='--param')
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise click.BadParameter(f"'{value}' is not a number", param_hint='--param')
    return params


@click.group()
@click.option('--env', 'env_name', default=None, help="Environment configuration (development, testing, production)")
@click.pass_context
def main(ctx, env_name):
    """Walk-forward evolutionary meta-game allocation engine."""
    ctx.ensure_object(dict)
    ctx.obj['settings'] = init_app(env_name)


@main.command()
@click.option('--config', 'config_path', required=True, help="Run configuration file")
@click.option('--seed', type=int, default=None, help="Override the configured seed")
@click.option('--jobs', type=int, default=None, help="Parallel window workers")
@click.option('--output', default=None, help="Bundle directory")
@click.option('--backend', type=click.Choice(['local', 'celery']), default=None,
              help="Where window jobs run")
@click.pass_context
def run(ctx, config_path, seed, jobs, output, backend):
    """Run the full walk-forward protocol and write an evidence bundle."""
    result = _execute(ctx, 'run', {'config_path': config_path, 'seed': seed, 'jobs': jobs,
                                   'output': output, 'backend': backend})
    _echo_summary(result)


@main.command()
@click.option('--config', 'config_path', required=True, help="Run configuration file")
@click.option('--kind', required=True,
              type=click.Choice(['buy_and_hold', 'panel_ridge', 'dqn_lite', 'random_signal',
                                 'zero_signal']))
@click.option('--param', 'params', multiple=True, help="Baseline parameter as key=value")
@click.option('--seed', type=int, default=None, help="Override the configured seed")
@click.option('--jobs', type=int, default=None, help="Parallel window workers")
@click.option('--output', default=None, help="Bundle directory")
@click.pass_context
def baseline(ctx, config_path, kind, params, seed, jobs, output):
    """Run a reference strategy through the same windows."""
    result = _execute(ctx, 'baseline', {'config_path': config_path, 'kind': kind,
                                        'params': _parse_params(params), 'seed': seed,
                                        'jobs': jobs, 'output': output})
    _echo_summary(result)


@main.command()
@click.argument('bundle')
@click.option('--scenario', 'scenarios', multiple=True, help="Scenario name (default: all configured)")
@click.pass_context
def stress(ctx, bundle, scenarios):
    """Rerun a bundle's OOS positions under cost, impact and capacity multipliers."""
    result = _execute(ctx, 'stress', {'bundle': bundle, 'scenarios': list(scenarios)})
    click.echo(result['table'].to_string(index=False))
    click.echo(f"wrote {result['path']}")


@main.command()
@click.argument('bundle')
@click.option('--benchmarks', required=True, help="CSV with a date column and one return column per benchmark")
@click.pass_context
def crossmarket(ctx, bundle, benchmarks):
    """Compare a bundle's OOS returns against other benchmarks."""
    result = _execute(ctx, 'crossmarket', {'bundle': bundle, 'benchmarks': benchmarks})
    click.echo(result['table'].to_string(index=False))
    click.echo(f"wrote {result['path']}")


@main.command()
@click.argument('bundles', nargs=-1, required=True)
@click.option('--reference', required=True, help="Bundle every model is compared against")
@click.option('--output', default=None, help="Directory for the test tables")
@click.pass_context
def stats(ctx, bundles, reference, output):
    """Pairwise and global significance tests across bundles."""
    result = _execute(ctx, 'stats', {'bundles': list(bundles), 'reference': reference,
                                     'output': output})
    click.echo(result['table'].to_string(index=False))
    click.echo(f"wrote {result['pairwise']} and {result['global']}")


@main.command()
@click.option('--config', 'config_path', required=True, help="Run configuration with a [synthetic] section")
@click.option('--seed', type=int, default=None, help="Override the configured seed")
@click.option('--output', required=True, help="CSV path")
@click.pass_context
def synth(ctx, config_path, seed, output):
    """Write a synthetic price panel as CSV."""
    result = _execute(ctx, 'synth', {'config_path': config_path, 'seed': seed, 'output': output})
    click.echo(f"wrote {result['path']}")


if __name__ == '__main__':
    sys.exit(main())
