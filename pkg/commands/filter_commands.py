"""
Command module for filter-bank commands.
"""

from pathlib import Path

import click
import structlog

from business.hebbian_business import convergence_report, train_block_filters
from commands.common import (
    CliContext,
    config_option,
    load_split,
    output_dir,
    pass_context,
    read_run_config,
)
from commands.docs.filter_doc import (
    EXPORT_ATLAS_DESCRIPTION,
    EXPORT_ATLAS_SUMMARY,
    INSPECT_DESCRIPTION,
    INSPECT_SUMMARY,
    TRAIN_FILTERS_DESCRIPTION,
    TRAIN_FILTERS_SUMMARY,
)
from entities.layers import BlockType
from repositories.config_repository import save_config
from repositories.filter_bank_repository import BANK_MAGIC, load_filter_bank, save_filter_bank
from repositories.model_repository import MODEL_MAGIC, load_model
from services.atlas import ATLAS_ORDERS, export_filter_atlas
from validations.base import BaseValidation
from validations.errors import FormatError

log = structlog.get_logger()


@click.command('train-filters', short_help=TRAIN_FILTERS_SUMMARY,
               help=f'{TRAIN_FILTERS_SUMMARY}\n\n{TRAIN_FILTERS_DESCRIPTION}')
@config_option
@click.option('--out', 'out_dir', type=click.Path(file_okay=False, path_type=Path),
              help='Directory for the .nnlf files (default: run.output_dir).')
@pass_context
def train_filters(cli_context: CliContext, config_path: Path, out_dir: Path):
    """
    Trains and writes block<i>.nnlf for every NNL block.
    """

    config = read_run_config(cli_context, config_path)
    train, _ = load_split(config)

    banks = train_block_filters(train, config.blocks, config.filters, config.run.seed,
                                n_jobs=cli_context.n_jobs(config))

    target = out_dir or output_dir(config)
    target.mkdir(parents=True, exist_ok=True)
    save_config(config, target / 'filters.cfg')

    for index, bank in enumerate(banks):
        path = target / f'block{index}.nnlf'
        save_filter_bank(bank, path)
        click.echo(str(path))


@click.command('export-atlas', short_help=EXPORT_ATLAS_SUMMARY,
               help=f'{EXPORT_ATLAS_SUMMARY}\n\n{EXPORT_ATLAS_DESCRIPTION}')
@click.option('--filters', 'filters_path', required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--out', 'out_path', required=True, type=click.Path(path_type=Path))
@click.option('--columns', default=20, show_default=True, type=click.IntRange(min=1))
@click.option('--order', default='wins', show_default=True, type=click.Choice(ATLAS_ORDERS))
def export_atlas(filters_path: Path, out_path: Path, columns: int, order: str):
    """
    Writes the PNG atlas of one bank.
    """

    export_filter_atlas(load_filter_bank(filters_path), columns, out_path, order)
    click.echo(str(out_path))


def _describe_bank(bank) -> list:
    report = convergence_report(bank)
    wins = int(bank.win_counts.sum())
    return [
        f'  filters     K={bank.channels} W={bank.window} N={bank.n_inputs}',
        f'  wins        {wins} in the last epoch, {report.winning_rows} winning filter(s)',
        f'  converged   {report.converged_rows}/{report.winning_rows} within '
        f'{report.tolerance:g} of unit norm (max deviation {report.max_deviation:.4g})',
    ]


def _describe_model(arch) -> list:
    lines = [f'  blocks      {len(arch.blocks)}']
    for index, block in enumerate(arch.blocks):
        conv = block.conv
        kind = block.block_type.name
        power = f' n={conv.power}' if block.block_type == BlockType.NNL else ''
        lines.append(f'  block {index}     {kind} K={conv.channels} W={conv.window}{power} '
                     f'ST={conv.stride} W_p={block.pool.window} ST_p={block.pool.stride}')
    lines.append(f'  classifier  D={arch.classifier.feature_dim} C={arch.classifier.classes}')
    return lines


@click.command('inspect', short_help=INSPECT_SUMMARY,
               help=f'{INSPECT_SUMMARY}\n\n{INSPECT_DESCRIPTION}')
@click.argument('paths', nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False, path_type=Path))
def inspect(paths):
    """
    Prints one description per file.
    """

    for path in paths:
        with open(path, 'rb') as handle:
            magic = handle.read(4)

        if magic == BANK_MAGIC:
            lines = _describe_bank(load_filter_bank(path))
            kind = 'filter bank'
        elif magic == MODEL_MAGIC:
            lines = _describe_model(load_model(path))
            kind = 'model'
        else:
            BaseValidation.abort_with_error(FormatError, f'unknown magic {magic!r}.', str(path))

        click.echo(f'{path}: {kind}')
        click.echo('\n'.join(lines))
