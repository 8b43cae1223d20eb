"""
Validation module for layers and architectures.
"""

from typing import Sequence

from entities.filter_bank import FilterBank
from entities.layers import BlockArchitecture, NnlConvLayer
from entities.run_config import BlockConfig
from validations.base import BaseValidation
from validations.errors import ConfigurationError

MIN_EXPLORED_POWER = 1
MAX_EXPLORED_POWER = 100


class ModelValidation:
    """
    Validation class for network construction and inference.
    """

    @staticmethod
    def validate_nnl_layer(layer: NnlConvLayer) -> None:
        """
        Validate the power and stride of an NNL-CONV layer.

        Raises:
            ConfigurationError: If power or stride is not a positive integer.
        """
        BaseValidation.validate_positive_int(layer.power, 'power')
        BaseValidation.validate_positive_int(layer.stride, 'stride')
        BaseValidation.warn_outside_range(
            layer.power, MIN_EXPLORED_POWER, MAX_EXPLORED_POWER, 'power')

    @staticmethod
    def validate_pool(window: int, stride: int, side: int) -> None:
        """
        Validate a pooling layer against the side of its input map.

        Raises:
            ConfigurationError: If the window exceeds the map or a value is not positive.
        """
        BaseValidation.validate_positive_int(window, 'pool_window')
        BaseValidation.validate_positive_int(stride, 'pool_stride')
        if window > side:
            BaseValidation.abort_with_error(
                ConfigurationError, f'pool window {window} exceeds map side {side}.',
                'pool_window')

    @staticmethod
    def validate_feature_dim(arch: BlockArchitecture, feature_dim: int) -> None:
        """
        Validate that the classifier input matches the concatenated features.

        Raises:
            ConfigurationError: On mismatch or a missing classifier.
        """
        if arch.classifier is None:
            BaseValidation.abort_with_error(
                ConfigurationError, 'architecture has no classifier.', 'classifier')
        BaseValidation.validate_inner_dimensions(
            feature_dim, arch.classifier.feature_dim, 'classifier')

    @staticmethod
    def validate_banks_for_blocks(banks: Sequence[FilterBank],
                                  blocks: Sequence[BlockConfig]) -> None:
        """
        Validate that imported banks fit the NNL blocks of a template.

        Raises:
            ConfigurationError: If counts or windows differ.
        """
        nnl_blocks = [block for block in blocks if block.type == 'nnl']
        if len(banks) != len(nnl_blocks):
            BaseValidation.abort_with_error(
                ConfigurationError, f'{len(banks)} filter bank(s) for '
                f'{len(nnl_blocks)} NNL block(s).', 'filters')

        for index, (bank, block) in enumerate(zip(banks, nnl_blocks)):
            if bank.window != block.window:
                BaseValidation.abort_with_error(
                    ConfigurationError, f'bank {index} has window {bank.window}, '
                    f'block expects {block.window}.', 'filters')
