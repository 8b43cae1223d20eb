"""
Process-level settings read from the environment.

A .env file in the working directory is loaded first. Everything here
concerns how a run executes (threads, logging, memory, data location);
experiment hyperparameters live in run-config files.
"""

import os
from dotenv import load_dotenv

load_dotenv()

_TRUE = {'1', 'true', 'yes', 'on'}
_FALSE = {'0', 'false', 'no', 'off'}


def _to_bool(text: str) -> bool:
    lowered = str(text).strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ValueError(f'not a boolean: {text!r}')


def get_env(name: str, default=None, *, required=False, cast=None):
    """
    Read one NNL_* variable.

    Args:
        name (str): Variable name.
        default (Any): Returned when the variable is unset or empty.
        required (bool): Fail instead of falling back to the default.
        cast (Callable): Conversion such as int or float; bool accepts
            1/0, true/false, yes/no and on/off.

    Returns:
        Any: The converted value, or the default.

    Raises:
        EnvironmentError: If a required variable is missing.
        ValueError: If the value cannot be converted.
    """
    value = os.getenv(name) or None
    if value is None:
        if required:
            raise EnvironmentError(f"Missing required environment variable: {name}")
        return default

    if cast is None:
        return value
    try:
        return _to_bool(value) if cast is bool else cast(value)
    except ValueError as exc:
        raise ValueError(f"{name}={value!r} is not a valid {cast.__name__}") from exc


THREADS = get_env("NNL_THREADS", default=1, cast=int)
LOG_LEVEL = get_env("NNL_LOG_LEVEL", default="INFO")
LOG_FORMAT = get_env("NNL_LOG_FORMAT", default="console")
FEATURE_CACHE_MB = get_env("NNL_FEATURE_CACHE_MB", default=2048, cast=int)
DATA_DIR = get_env("NNL_DATA_DIR")
