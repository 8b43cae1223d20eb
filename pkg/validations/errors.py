"""
Error hierarchy shared by every module.
"""


class NnlError(Exception):
    """
    Base class for all domain errors.

    Attributes:
        message (str): Human readable description.
        field (str): Name of the offending key, argument or file.
        exit_code (int): Process exit code used by the command line.
    """

    exit_code = 1

    def __init__(self, message: str, field: str = 'input') -> None:
        super().__init__(message)
        self.message = message
        self.field = field

    def __str__(self) -> str:
        return f'{self.field}: {self.message}'


class ConfigurationError(NnlError):
    """
    Invalid arguments, shapes or configuration values.
    """


class FormatError(NnlError):
    """
    Malformed input file.
    """


class TrainingError(NnlError):
    """
    Numerical failure during training (NaN loss or gradient).
    """

    exit_code = 2
