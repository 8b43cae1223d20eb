"""
Validation module for all entities.
"""

from typing import Any, Type

import numpy as np
import structlog

from validations.errors import ConfigurationError, NnlError, TrainingError

log = structlog.get_logger()


class BaseValidation:
    """
    Base validation class providing common validation utilities.

    This class serves as a foundation for domain-specific validators,
    offering reusable methods for type checking, range checks and
    standardized error raising.
    """

    @staticmethod
    def abort_with_error(kind: Type[NnlError], message: str, field: str = 'input') -> None:
        """
        Abort with a domain error.

        Args:
            kind (Type[NnlError]): Error class to raise.
            message (str): The error message to display.
            field (str): The field name for error categorization. Defaults to 'input'.

        Raises:
            NnlError: Always raises an instance of `kind`.
        """
        raise kind(message, field)

    @staticmethod
    def validate_positive_int(value: Any, name: str) -> None:
        """
        Validate that a value is a positive integer.

        Args:
            value (Any): The value to validate.
            name (str): The field name for error messages.

        Raises:
            ConfigurationError: If value is not a positive integer.
        """
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value <= 0:
            BaseValidation.abort_with_error(
                ConfigurationError, f'{name} must be a positive integer, got {value!r}.', name)

    @staticmethod
    def validate_non_negative_int(value: Any, name: str) -> None:
        """
        Validate that a value is an integer greater than or equal to zero.

        Raises:
            ConfigurationError: If value is negative or not an integer.
        """
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 0:
            BaseValidation.abort_with_error(
                ConfigurationError, f'{name} must be a non-negative integer, got {value!r}.', name)

    @staticmethod
    def validate_open_interval(value: float, low: float, high: float, name: str) -> None:
        """
        Validate that low < value < high.

        Raises:
            ConfigurationError: If value lies outside the open interval.
        """
        if not low < value < high:
            BaseValidation.abort_with_error(
                ConfigurationError, f'{name} must lie in ({low}, {high}), got {value}.', name)

    @staticmethod
    def validate_inner_dimensions(left: int, right: int, name: str = 'shape') -> None:
        """
        Validate that the inner dimensions of a product agree.

        Raises:
            ConfigurationError: If dimensions differ.
        """
        if left != right:
            BaseValidation.abort_with_error(
                ConfigurationError, f'dimension mismatch: {left} != {right}.', name)

    @staticmethod
    def validate_finite(values: np.ndarray, name: str) -> None:
        """
        Validate that an array holds no NaN or Inf.

        Raises:
            TrainingError: If any entry is not finite.
        """
        if not np.all(np.isfinite(values)):
            bad = int(np.size(values) - np.count_nonzero(np.isfinite(values)))
            BaseValidation.abort_with_error(
                TrainingError, f'{bad} non-finite value(s) encountered.', name)

    @staticmethod
    def warn_outside_range(value: float, low: float, high: float, name: str) -> bool:
        """
        Log a warning when a hyperparameter leaves its explored range.

        Args:
            value (float): The value to check.
            low (float): Lowest explored value.
            high (float): Highest explored value.
            name (str): Hyperparameter name.

        Returns:
            bool: True if a warning was emitted.
        """
        if low <= value <= high:
            return False

        log.warning('hyperparameter outside explored range',
                    name=name, value=value, low=low, high=high)
        return True
