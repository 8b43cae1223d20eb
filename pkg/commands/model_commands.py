"""
Command module for supervised training commands.
"""

from pathlib import Path

import click

from business.model_business import build_conv_architecture, build_nnl_architecture
from business.supervised_business import supervised_config, train_end_to_end, train_top_layer
from commands.common import (
    CliContext,
    bank_paths,
    config_option,
    load_banks,
    load_split,
    output_dir,
    pass_context,
    read_run_config,
)
from commands.docs.model_doc import (
    TRAIN_CLASSIFIER_DESCRIPTION,
    TRAIN_CLASSIFIER_SUMMARY,
    TRAIN_E2E_DESCRIPTION,
    TRAIN_E2E_SUMMARY,
)
from repositories.model_repository import save_model
from repositories.report_repository import write_training_log
from validations.base import BaseValidation
from validations.errors import ConfigurationError

out_option = click.option('--out', 'out_path', type=click.Path(dir_okay=False, path_type=Path),
                          help='Model file (default: <output_dir>/<name>.nnlm).')
log_option = click.option('--log', 'log_path', type=click.Path(dir_okay=False, path_type=Path),
                          help='CSV log (default: next to the model, .csv).')


def _require_block_type(config, block_type: str) -> None:
    other = [index for index, block in enumerate(config.blocks) if block.type != block_type]
    if other:
        BaseValidation.abort_with_error(
            ConfigurationError, f'block(s) {other} are not {block_type} blocks.',
            'architecture.type')


def _write_outputs(arch, history, config, out_path: Path, log_path: Path, name: str) -> None:
    out_path = out_path or output_dir(config) / f'{name}.nnlm'
    log_path = log_path or out_path.with_suffix('.csv')
    out_path.parent.mkdir(parents=True, exist_ok=True)

    save_model(arch, out_path)
    write_training_log(history, log_path)
    click.echo(str(out_path))
    click.echo(str(log_path))


@click.command('train-classifier', short_help=TRAIN_CLASSIFIER_SUMMARY,
               help=f'{TRAIN_CLASSIFIER_SUMMARY}\n\n{TRAIN_CLASSIFIER_DESCRIPTION}')
@config_option
@click.option('--filters', 'filter_paths', multiple=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help='One .nnlf per NNL block (default: <output_dir>/block<i>.nnlf).')
@out_option
@log_option
@pass_context
def train_classifier(cli_context: CliContext, config_path: Path, filter_paths,
                     out_path: Path, log_path: Path):
    """
    Trains the classifier of an NNL network and writes the model and its log.
    """

    config = read_run_config(cli_context, config_path)
    _require_block_type(config, 'nnl')
    training = supervised_config(config.classifier)
    banks = load_banks(bank_paths(config, filter_paths))
    train, held_out = load_split(config)

    arch = build_nnl_architecture(banks, config.blocks, train.class_count, config.run.seed,
                                  side=train.side, weight_scale=training.weight_scale)
    arch, history = train_top_layer(arch, train, training, config.run.seed, test=held_out,
                                    n_jobs=cli_context.n_jobs(config))

    _write_outputs(arch, history, config, out_path, log_path, 'nnl')


@click.command('train-e2e', short_help=TRAIN_E2E_SUMMARY,
               help=f'{TRAIN_E2E_SUMMARY}\n\n{TRAIN_E2E_DESCRIPTION}')
@config_option
@out_option
@log_option
@pass_context
def train_e2e(cli_context: CliContext, config_path: Path, out_path: Path, log_path: Path):
    """
    Trains a CONV baseline and writes the model and its log.
    """

    config = read_run_config(cli_context, config_path)
    _require_block_type(config, 'conv')
    training = supervised_config(config.classifier)
    train, held_out = load_split(config)

    arch = build_conv_architecture(config.blocks, train.class_count, config.run.seed,
                                   side=train.side, weight_scale=training.weight_scale)
    arch, history = train_end_to_end(arch, train, training, config.run.seed, test=held_out,
                                     n_jobs=cli_context.n_jobs(config))

    _write_outputs(arch, history, config, out_path, log_path, 'conv')
