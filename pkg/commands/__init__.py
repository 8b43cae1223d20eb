"""
Registers the commands with the command-line group.
"""

import click

from commands.evaluation_commands import evaluate_models, transfer_filters
from commands.filter_commands import export_atlas, inspect, train_filters
from commands.model_commands import train_classifier, train_e2e


def register_commands(cli: click.Group):
    """
    Registers all commands.

    Args:
        cli (click.Group): The top-level group.
    """

    cli.add_command(train_filters)
    cli.add_command(train_classifier)
    cli.add_command(train_e2e)
    cli.add_command(evaluate_models)
    cli.add_command(transfer_filters)
    cli.add_command(export_atlas)
    cli.add_command(inspect)
