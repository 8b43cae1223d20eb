"""
Main entry point for the command line.

This module builds the click group, applies the global options,
registers the commands, and maps errors to exit codes.
"""

import sys

import click
import structlog

from commands import register_commands
from commands.common import CliContext
from services.logger import configure_logging
from settings import LOG_FORMAT, LOG_LEVEL
from validations.errors import NnlError

EXIT_OK = 0
EXIT_USER_ERROR = 1
EXIT_INTERNAL_ERROR = 2

log = structlog.get_logger()


@click.group()
@click.option('--log-level', default=LOG_LEVEL, show_default=True,
              type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False))
@click.option('--seed', type=click.IntRange(min=0), help='Override run.seed.')
@click.option('--threads', type=click.IntRange(min=1), help='Override run.threads.')
@click.option('--set', 'overrides', multiple=True, metavar='SECTION.KEY=VALUE',
              help='Override a config key; may be repeated.')
@click.pass_context
def cli(ctx: click.Context, log_level: str, seed: int, threads: int, overrides):
    """
    Hebbian filter learning and NNL-CONV networks.
    """

    configure_logging(log_level, LOG_FORMAT)
    ctx.obj = CliContext(seed=seed, threads=threads, overrides=list(overrides))


register_commands(cli)


def main(argv=None) -> int:
    """
    Runs the command line and returns the process exit code.

    Domain errors print `error: <field>: <message>`; unexpected exceptions
    exit with 2.
    """

    try:
        result = cli.main(args=argv, prog_name='nnl', standalone_mode=False)
    except NnlError as error:
        click.echo(f'error: {error}', err=True)
        return error.exit_code
    except click.ClickException as error:
        click.echo(f'error: {error.format_message()}', err=True)
        return EXIT_USER_ERROR
    except click.Abort:
        return EXIT_USER_ERROR
    except OSError as error:
        click.echo(f'error: {error.filename or "io"}: {error.strerror or error}', err=True)
        return EXIT_USER_ERROR
    except Exception as error:
        log.exception('unexpected failure')
        click.echo(f'error: internal: {error}', err=True)
        return EXIT_INTERNAL_ERROR

    return result if isinstance(result, int) else EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
