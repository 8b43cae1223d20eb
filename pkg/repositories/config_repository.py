"""
Repository module for run configuration files.

A config file holds [section] headers followed by key = value lines; '#'
starts a comment. Per-block architecture keys take a single value or a
comma separated list.
"""

import configparser
from dataclasses import fields as dataclass_fields
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Union

from marshmallow import ValidationError

from entities.run_config import RunConfig
from schemas.run_config_schema import RunConfigSchema
from validations.base import BaseValidation
from validations.config_validation import ConfigValidation
from validations.errors import ConfigurationError

RawConfig = Dict[str, Dict[str, str]]

SECTION_ORDER = ('run', 'data', 'filters', 'architecture', 'classifier', 'transfer')
BLOCK_KEYS = ('type', 'channels', 'window', 'power', 'stride', 'pool_window',
              'pool_stride', 'delta', 'rank_m')


def read_sections(text: str, source: str = 'config') -> RawConfig:
    """
    Split config text into sections of raw string values.

    Raises:
        ConfigurationError: On a line outside any section or a duplicate key.
    """

    parser = configparser.ConfigParser(
        interpolation=None, comment_prefixes=('#',), inline_comment_prefixes=('#',),
        empty_lines_in_values=False)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as error:
        BaseValidation.abort_with_error(
            ConfigurationError, ' '.join(str(error).split()), source)

    return {section: dict(parser.items(section)) for section in parser.sections()}


def apply_overrides(raw: RawConfig, overrides: Iterable[str]) -> RawConfig:
    """
    Apply `section.key=value` overrides on top of the file values.

    Raises:
        ConfigurationError: If an override is malformed.
    """

    merged = {section: dict(values) for section, values in raw.items()}
    for override in overrides:
        target, separator, value = override.partition('=')
        section, dot, key = target.strip().partition('.')
        if not separator or not dot or not section or not key:
            BaseValidation.abort_with_error(
                ConfigurationError, f'expected section.key=value, got {override!r}.', 'set')
        merged.setdefault(section, {})[key.lower()] = value.strip()
    return merged


def _first_error(messages, path: List[str]):
    if isinstance(messages, Mapping):
        key = sorted(messages, key=str)[0]
        inner = messages[key]
        return _first_error(inner, path if key == '_schema' else path + [str(key)])
    if isinstance(messages, (list, tuple)) and messages:
        return _first_error(messages[0], path)
    return '.'.join(path) or 'config', str(messages)


def load_config(raw: RawConfig) -> RunConfig:
    """
    Validate raw sections into a RunConfig.

    Raises:
        ConfigurationError: On unknown sections or keys, missing required keys
            and values of the wrong type or range.
    """

    try:
        config = RunConfigSchema().load(raw)
    except ValidationError as error:
        field, message = _first_error(error.messages, [])
        BaseValidation.abort_with_error(ConfigurationError, message, field)

    ConfigValidation.warn_sweep_ranges(config.blocks)
    return config


def parse_config_text(text: str, overrides: Iterable[str] = (),
                      source: str = 'config') -> RunConfig:
    """
    Parse config text, apply overrides, and validate.
    """

    return load_config(apply_overrides(read_sections(text, source), overrides))


def parse_config(path: Union[str, Path], overrides: Iterable[str] = ()) -> RunConfig:
    """
    Parse and validate a config file.

    Args:
        path (str | Path): The file.
        overrides (Iterable[str]): `section.key=value` strings applied after the file.

    Returns:
        RunConfig: The validated config.

    Raises:
        ConfigurationError: If the file is missing or invalid.
    """

    path = Path(path)
    if not path.is_file():
        BaseValidation.abort_with_error(ConfigurationError, 'no such config file.', str(path))
    return parse_config_text(path.read_text(encoding='utf-8'), overrides, str(path))


def _format_value(value) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ','.join(_format_value(item) for item in value)
    return str(value)


def _section_lines(section) -> List[str]:
    lines = []
    for item in dataclass_fields(section):
        value = getattr(section, item.name)
        if value is None or (isinstance(value, list) and not value):
            continue
        lines.append(f'{item.name} = {_format_value(value)}')
    return lines


def _architecture_lines(config: RunConfig) -> List[str]:
    lines = [f'blocks = {len(config.blocks)}']
    for key in BLOCK_KEYS:
        values = [getattr(block, key) for block in config.blocks]
        shown = values[:1] if all(value == values[0] for value in values) else values
        lines.append(f'{key} = {_format_value(shown)}')
    return lines


def serialize_config(config: RunConfig) -> str:
    """
    Config text that parses back to an equal RunConfig.
    """

    chunks = []
    for name in SECTION_ORDER:
        lines = _architecture_lines(config) if name == 'architecture' \
            else _section_lines(getattr(config, name))
        chunks.append('\n'.join([f'[{name}]'] + lines))
    return '\n\n'.join(chunks) + '\n'


def save_config(config: RunConfig, path: Union[str, Path]) -> None:
    """
    Write a config next to the artifacts it produced.
    """

    Path(path).write_text(serialize_config(config), encoding='utf-8')
