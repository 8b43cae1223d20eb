"""
Command module for evaluation and transfer commands.
"""

from pathlib import Path

import click

from business.evaluation_business import compare_shadow, evaluate, transfer
from business.supervised_business import supervised_config
from commands.common import (
    CliContext,
    ShadowParam,
    bank_paths,
    config_option,
    load_banks,
    load_split,
    load_test_set,
    pass_context,
    read_optional_config,
    read_run_config,
)
from commands.docs.evaluation_doc import (
    EVAL_DESCRIPTION,
    EVAL_SUMMARY,
    SCALE_HELP,
    SHADOW_HELP,
    TRANSFER_DESCRIPTION,
    TRANSFER_SUMMARY,
)
from repositories.model_repository import load_model
from repositories.report_repository import (
    format_eval_report,
    format_transfer_report,
    write_eval_reports,
    write_transfer_report,
)

report_option = click.option('--report', 'report_path',
                             type=click.Path(dir_okay=False, path_type=Path),
                             help='Also write the report as CSV.')


@click.command('eval', short_help=EVAL_SUMMARY, help=f'{EVAL_SUMMARY}\n\n{EVAL_DESCRIPTION}')
@click.option('--model', 'model_paths', required=True, multiple=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--config', 'config_path',
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help='Config whose held-out set is evaluated.')
@click.option('--data', 'data_paths', multiple=True, help='Evaluate on these files instead.')
@click.option('--format', 'fmt', default='cifar10', show_default=True,
              type=click.Choice(['cifar10', 'raw']))
@click.option('--shadow', type=ShadowParam(), help=SHADOW_HELP)
@click.option('--scale', default=1.0, show_default=True,
              type=click.FloatRange(min=0, min_open=True), help=SCALE_HELP)
@report_option
@pass_context
def evaluate_models(cli_context: CliContext, model_paths, config_path: Path, data_paths,
                    fmt: str, shadow, scale: float, report_path: Path):
    """
    Prints one report per model; with --shadow, raw and shadowed reports.
    """

    config = read_optional_config(cli_context, config_path)
    dataset = load_test_set(config, data_paths, fmt)
    n_jobs = cli_context.n_jobs(config)
    models = {str(path): load_model(path) for path in model_paths}

    reports = []
    if shadow is not None and scale == 1.0:
        for name, (raw, shadowed) in compare_shadow(models, dataset, shadow, n_jobs).items():
            reports.extend([raw, shadowed])
            click.echo(f'{name}\n{format_eval_report(raw)}\n{format_eval_report(shadowed)}')
    else:
        for name, arch in models.items():
            report = evaluate(arch, dataset, shadow, scale, n_jobs)
            reports.append(report)
            click.echo(f'{name}\n{format_eval_report(report)}')

    if report_path is not None:
        write_eval_reports(reports, report_path)


@click.command('transfer', short_help=TRANSFER_SUMMARY,
               help=f'{TRANSFER_SUMMARY}\n\n{TRANSFER_DESCRIPTION}')
@config_option
@click.option('--filters', 'filter_paths', multiple=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help='Banks learned on the source dataset, one per NNL block.')
@click.option('--runs', type=click.IntRange(min=1), help='Seeded runs (default: transfer.runs).')
@report_option
@pass_context
def transfer_filters(cli_context: CliContext, config_path: Path, filter_paths, runs: int,
                     report_path: Path):
    """
    Retrains the top layer on the config's dataset and prints mean and std.
    """

    config = read_run_config(cli_context, config_path)
    banks = load_banks(bank_paths(config, filter_paths))
    train, held_out = load_split(config)
    if held_out is None:
        raise click.UsageError('the config has neither test files nor use_validation.')

    result = transfer(banks, train, held_out, config.blocks, supervised_config(config.classifier),
                      config.run.seed, runs=runs or config.transfer.runs,
                      n_jobs=cli_context.n_jobs(config))

    click.echo(format_transfer_report(result))
    if report_path is not None:
        write_transfer_report(result, report_path)
