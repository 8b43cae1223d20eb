"""
Helpers shared by the command modules.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import click
from marshmallow import ValidationError

from business.dataset_business import split_train_val, take_first
from entities.dataset import ImageDataset, ShadowSpec
from entities.filter_bank import FilterBank
from entities.run_config import RunConfig
from repositories.config_repository import parse_config
from repositories.dataset_repository import load_dataset
from repositories.filter_bank_repository import load_filter_bank
from schemas.report_schema import ShadowSchema
from settings import DATA_DIR, THREADS


@dataclass
class CliContext:
    """
    Global options, stored on the click context.

    Attributes:
        seed (Optional[int]): --seed, overriding run.seed.
        threads (Optional[int]): --threads, overriding run.threads.
        overrides (List[str]): --set section.key=value strings.
    """

    seed: Optional[int] = None
    threads: Optional[int] = None
    overrides: List[str] = field(default_factory=list)

    def all_overrides(self) -> List[str]:
        """
        --set values followed by --seed and --threads, which win.
        """
        extra = list(self.overrides)
        if self.seed is not None:
            extra.append(f'run.seed={self.seed}')
        if self.threads is not None:
            extra.append(f'run.threads={self.threads}')
        return extra

    def n_jobs(self, config: RunConfig = None) -> int:
        """
        Thread count: --threads, then the config, then NNL_THREADS.
        """
        if self.threads is not None:
            return self.threads
        return config.run.threads if config is not None else THREADS

    def run_seed(self, config: RunConfig = None) -> int:
        """
        Seed: --seed, then the config, then 0.
        """
        if self.seed is not None:
            return self.seed
        return config.run.seed if config is not None else 0


pass_context = click.make_pass_decorator(CliContext, ensure=True)

config_option = click.option(
    '--config', 'config_path', required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help='Run configuration file.')


class ShadowParam(click.ParamType):
    """
    Click parameter parsing `cols=<n>,factor=<I>` into a ShadowSpec.
    """

    name = 'shadow'

    def convert(self, value, param, ctx) -> ShadowSpec:
        if isinstance(value, ShadowSpec):
            return value

        pairs = {}
        for item in str(value).split(','):
            key, separator, text = item.partition('=')
            if not separator:
                self.fail(f'expected cols=<n>,factor=<I>, got {value!r}.', param, ctx)
            pairs[key.strip()] = text.strip()
        try:
            return ShadowSchema().load(pairs)
        except ValidationError as error:
            self.fail(f'{value!r}: {error.messages}', param, ctx)
        return None


def read_run_config(cli_context: CliContext, path: Path) -> RunConfig:
    """
    Parse a config file with the global overrides applied.
    """

    return parse_config(path, cli_context.all_overrides())


def read_optional_config(cli_context: CliContext, path: Optional[Path]) -> Optional[RunConfig]:
    """
    Like read_run_config, but None without a file.
    """

    if path is None:
        return None
    return read_run_config(cli_context, path)


def load_split(config: RunConfig) -> Tuple[ImageDataset, Optional[ImageDataset]]:
    """
    Training set and held-out set described by a config.

    With use_validation the held-out set is a seeded split of the training
    files; otherwise it is the test files, or None if there are none.
    """

    data = config.data
    train = take_first(load_dataset(data.train, data.format, 'train', DATA_DIR),
                       data.train_limit)
    if data.use_validation:
        return split_train_val(train, data.val_fraction, config.run.seed)
    if not data.test:
        return train, None

    test = load_dataset(data.test, data.format, 'test', DATA_DIR)
    return train, take_first(test, data.test_limit)


def load_test_set(config: Optional[RunConfig], files: Sequence[str],
                  fmt: str) -> ImageDataset:
    """
    Evaluation images: --data files when given, else the config's held-out set.
    """

    if files:
        return load_dataset(list(files), fmt, 'eval', DATA_DIR)
    if config is None:
        raise click.UsageError('give --config or --data.')

    _, held_out = load_split(config)
    if held_out is None:
        raise click.UsageError('the config has neither test files nor use_validation.')
    return held_out


def output_dir(config: RunConfig) -> Path:
    """
    The config's output directory, created if needed.
    """

    path = Path(config.run.output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def bank_paths(config: RunConfig, given: Sequence[Path]) -> List[Path]:
    """
    Filter files: the given ones, else block<i>.nnlf in the output directory.
    """

    if given:
        return list(given)
    count = sum(1 for block in config.blocks if block.type == 'nnl')
    return [Path(config.run.output_dir) / f'block{index}.nnlf' for index in range(count)]


def load_banks(paths: Sequence[Path]) -> List[FilterBank]:
    """
    Read several .nnlf files in order.
    """

    return [load_filter_bank(path) for path in paths]
