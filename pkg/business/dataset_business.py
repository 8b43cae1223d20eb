"""
Business module for dataset splits, shadows and pixel scaling.
"""

from typing import Sequence, Tuple

import numpy as np

from entities.dataset import ImageDataset, ShadowSpec
from validations.dataset_validation import DatasetValidation


def split_indices(count: int, val_fraction: float, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Seeded partition of range(count) into train and validation indices.

    Args:
        count (int): Number of records.
        val_fraction (float): Share of records held out, in (0, 1).
        seed (int): Seed of the permutation.

    Returns:
        Tuple[np.ndarray, np.ndarray]: Sorted train and validation indices.
    """

    DatasetValidation.validate_fraction(val_fraction)
    n_val = int(round(count * val_fraction))
    n_val = min(max(n_val, 1), count - 1) if count > 1 else 0

    permutation = np.random.default_rng(seed).permutation(count)
    return np.sort(permutation[n_val:]), np.sort(permutation[:n_val])


def subset(dataset: ImageDataset, indices: Sequence[int], name: str = None) -> ImageDataset:
    """
    Records at the given indices, in index order.
    """

    indices = np.asarray(indices, dtype=np.int64)
    return ImageDataset(images=dataset.images[indices], labels=dataset.labels[indices],
                        class_count=dataset.class_count, name=name or dataset.name)


def take_first(dataset: ImageDataset, count: int = None) -> ImageDataset:
    """
    The first `count` records (all of them when count is None).
    """

    if count is None or count >= len(dataset):
        return dataset
    return subset(dataset, np.arange(count), f'{dataset.name}[:{count}]')


def split_train_val(dataset: ImageDataset, val_fraction: float,
                    seed: int) -> Tuple[ImageDataset, ImageDataset]:
    """
    Seeded disjoint split into a training and a validation set.

    Args:
        dataset (ImageDataset): Records to split.
        val_fraction (float): Share of records held out, in (0, 1).
        seed (int): Seed of the permutation.

    Returns:
        Tuple[ImageDataset, ImageDataset]: (train, validation).

    Raises:
        ConfigurationError: If the dataset is empty or the fraction is invalid.
    """

    DatasetValidation.validate_not_empty(dataset)
    train_idx, val_idx = split_indices(len(dataset), val_fraction, seed)

    return (subset(dataset, train_idx, f'{dataset.name}-train'),
            subset(dataset, val_idx, f'{dataset.name}-val'))


def combine(first: ImageDataset, second: ImageDataset, name: str = None) -> ImageDataset:
    """
    Concatenation of two datasets with the same classes.

    Raises:
        ConfigurationError: If the class counts differ.
    """

    DatasetValidation.validate_same_classes(first, second)
    return ImageDataset(images=np.concatenate([first.images, second.images]),
                        labels=np.concatenate([first.labels, second.labels]),
                        class_count=first.class_count,
                        name=name or f'{first.name}+{second.name}')


def apply_illumination(dataset: ImageDataset, intensity: np.ndarray,
                       name: str = None) -> ImageDataset:
    """
    Multiply every channel pixelwise by an illumination field I(x, y).

    Products are rounded to the nearest 8-bit value, halves upward
    (floor(x + 0.5)), the same rule the filter atlas uses.

    Args:
        dataset (ImageDataset): Source images.
        intensity (np.ndarray): Field broadcastable to (H, W), values in (0, 1].
        name (str): Name of the result.

    Returns:
        ImageDataset: Dimmed images, labels unchanged.
    """

    intensity = np.asarray(intensity, dtype=np.float64)
    DatasetValidation.validate_intensity_map(intensity, dataset.side)

    dimmed = np.floor(dataset.images * intensity + 0.5)
    return ImageDataset(images=np.clip(dimmed, 0, 255).astype(np.uint8),
                        labels=dataset.labels.copy(), class_count=dataset.class_count,
                        name=name or f'{dataset.name}-lit')


def apply_shadow(dataset: ImageDataset, spec: ShadowSpec) -> ImageDataset:
    """
    Dim the first spec.columns columns of every channel by spec.intensity.

    Raises:
        ConfigurationError: If the shadow is invalid for this image width.
    """

    DatasetValidation.validate_shadow(spec, dataset.side)

    field = np.ones(dataset.side)
    field[:spec.columns] = spec.intensity
    return apply_illumination(dataset, field, f'{dataset.name}-shadow({spec})')


def to_float(dataset: ImageDataset) -> np.ndarray:
    """
    Pixels scaled from [0, 255] to [0, 1] as float32, shape (n, 3, H, W).
    """

    return dataset.images.astype(np.float32) / np.float32(255)


def scale_images(images: np.ndarray, factor: float) -> np.ndarray:
    """
    Uniform illumination change of float images, without quantization.
    """

    return images * images.dtype.type(factor)
