"""
Validation module for datasets, shadows and file records.
"""

import numpy as np

from entities.dataset import ImageDataset, ShadowSpec
from validations.base import BaseValidation
from validations.errors import ConfigurationError, FormatError

CIFAR10_RECORD_BYTES = 3073
CIFAR10_CLASSES = 10


class DatasetValidation:
    """
    Validation class for datasets.

    Provides validation of on-disk record layouts, label ranges, split
    fractions and shadow specifications.
    """

    @staticmethod
    def validate_record_stream(size: int, record_bytes: int, path: str) -> None:
        """
        Validate that a file holds a whole number of records.

        Args:
            size (int): File size in bytes.
            record_bytes (int): Size of one record.
            path (str): File name for the error message.

        Raises:
            FormatError: If size is not a positive multiple of record_bytes.
        """
        if size == 0 or size % record_bytes != 0:
            BaseValidation.abort_with_error(
                FormatError, f'size {size} is not a multiple of {record_bytes} bytes.', path)

    @staticmethod
    def validate_labels(labels: np.ndarray, class_count: int, path: str) -> None:
        """
        Validate that every label is below the class count.

        Raises:
            FormatError: If a label is out of range.
        """
        if labels.size and int(labels.max()) >= class_count:
            record = int(np.argmax(labels >= class_count))
            BaseValidation.abort_with_error(
                FormatError, f'record {record} has label {int(labels[record])} '
                f'>= {class_count}.', path)

    @staticmethod
    def validate_not_empty(dataset: ImageDataset) -> None:
        """
        Validate that a dataset holds at least one image.

        Raises:
            ConfigurationError: If the dataset is empty.
        """
        if len(dataset) == 0:
            BaseValidation.abort_with_error(
                ConfigurationError, 'dataset is empty.', dataset.name)

    @staticmethod
    def validate_fraction(val_fraction: float) -> None:
        """
        Validate a validation-split fraction.

        Raises:
            ConfigurationError: If the fraction is not in (0, 1).
        """
        BaseValidation.validate_open_interval(val_fraction, 0.0, 1.0, 'val_fraction')

    @staticmethod
    def validate_shadow(spec: ShadowSpec, width: int = None) -> None:
        """
        Validate a shadow specification.

        Args:
            spec (ShadowSpec): The shadow.
            width (int): Image width; column bound checked when given.

        Raises:
            ConfigurationError: If intensity is outside (0, 1] or columns is out of range.
        """
        if not 0 < spec.intensity <= 1:
            BaseValidation.abort_with_error(
                ConfigurationError, f'intensity must lie in (0, 1], got {spec.intensity}.',
                'shadow')

        BaseValidation.validate_non_negative_int(spec.columns, 'shadow.columns')

        if width is not None and spec.columns > width:
            BaseValidation.abort_with_error(
                ConfigurationError, f'columns {spec.columns} exceed image width {width}.',
                'shadow')

    @staticmethod
    def validate_intensity_map(intensity: np.ndarray, side: int) -> None:
        """
        Validate an illumination field I(x, y).

        Raises:
            ConfigurationError: If the field is not broadcastable to the image
                plane or leaves (0, 1].
        """
        try:
            np.broadcast_shapes(np.shape(intensity), (side, side))
        except ValueError:
            BaseValidation.abort_with_error(
                ConfigurationError, f'shape {np.shape(intensity)} does not fit a '
                f'{side}x{side} image.', 'intensity')

        if np.any(intensity <= 0) or np.any(intensity > 1):
            BaseValidation.abort_with_error(
                ConfigurationError, 'intensity values must lie in (0, 1].', 'intensity')

    @staticmethod
    def validate_same_classes(first: ImageDataset, second: ImageDataset) -> None:
        """
        Validate that two datasets share their class count.

        Raises:
            ConfigurationError: On mismatch.
        """
        if first.class_count != second.class_count:
            BaseValidation.abort_with_error(
                ConfigurationError, f'class counts differ: {first.class_count} != '
                f'{second.class_count}.', 'class_count')
