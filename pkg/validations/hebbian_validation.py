"""
Validation module for filter-bank training.
"""

import numpy as np
import structlog

from entities.filter_bank import FilterBank, HebbianConfig
from validations.base import BaseValidation
from validations.errors import ConfigurationError

log = structlog.get_logger()

MAX_EXPLORED_DELTA = 0.3


class HebbianValidation:
    """
    Validation class for the local learning rule.
    """

    @staticmethod
    def validate_config(config: HebbianConfig) -> None:
        """
        Validate a training configuration.

        Hard errors cover values the rule cannot run with; a rank m above K
        only disables the anti-Hebbian term and Delta outside [0, 0.3] is
        logged as a warning.

        Raises:
            ConfigurationError: If a count is not positive or a rate is invalid.
        """
        BaseValidation.validate_positive_int(config.channels, 'channels')
        BaseValidation.validate_positive_int(config.window, 'window')
        BaseValidation.validate_positive_int(config.stride, 'stride')
        BaseValidation.validate_non_negative_int(config.epochs, 'epochs')
        BaseValidation.validate_positive_int(config.minibatch_size, 'minibatch_size')

        if config.rank_m < 2:
            BaseValidation.abort_with_error(
                ConfigurationError, f'rank_m must be >= 2, got {config.rank_m}.', 'rank_m')

        if not config.learning_rate > 0:
            BaseValidation.abort_with_error(
                ConfigurationError, 'learning_rate must be positive.', 'learning_rate')

        if config.anti_hebbian < 0:
            BaseValidation.abort_with_error(
                ConfigurationError, 'anti_hebbian must be >= 0.', 'anti_hebbian')

        BaseValidation.warn_outside_range(
            config.anti_hebbian, 0.0, MAX_EXPLORED_DELTA, 'anti_hebbian')

        if config.rank_m > config.channels:
            log.warning('rank_m exceeds channels, anti-Hebbian term disabled',
                        rank_m=config.rank_m, channels=config.channels)

    @staticmethod
    def validate_batch_shape(weights: np.ndarray, patches: np.ndarray) -> None:
        """
        Validate that patches and filters have the same length.

        Raises:
            ConfigurationError: On mismatch.
        """
        BaseValidation.validate_inner_dimensions(
            weights.shape[1], patches.shape[1], 'patches')

    @staticmethod
    def validate_bank(bank: FilterBank) -> None:
        """
        Validate the internal consistency of a bank.

        Raises:
            ConfigurationError: If the row length is not W*W*3 or the
                win counts do not match the rows.
        """
        if bank.n_inputs != bank.window * bank.window * 3:
            BaseValidation.abort_with_error(
                ConfigurationError, f'row length {bank.n_inputs} != 3*{bank.window}^2.',
                'window')

        if bank.win_counts.shape != (bank.channels,):
            BaseValidation.abort_with_error(
                ConfigurationError, 'win_counts must have one entry per row.', 'win_counts')
