"""
This module defines the image dataset and shadow types.
"""

from dataclasses import dataclass

import numpy as np

IMAGE_SIDE = 32
COLOR_CHANNELS = 3


@dataclass(frozen=True)
class ImageDataset:
    """
    Labeled RGB images in planar layout.

    Attributes:
        images (np.ndarray): uint8 array of shape (n, 3, H, W); for every
            image all R rows come first, then G, then B.
        labels (np.ndarray): int64 class index per image.
        class_count (int): Number of classes.
        name (str): Identifier used in logs and reports.
    """

    images: np.ndarray
    labels: np.ndarray
    class_count: int
    name: str

    def __post_init__(self) -> None:
        self.images.flags.writeable = False
        self.labels.flags.writeable = False

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @property
    def side(self) -> int:
        """
        Image width (equal to the height for every dataset in scope).
        """
        return int(self.images.shape[-1])


@dataclass(frozen=True)
class ShadowSpec:
    """
    Step illumination field: the leading columns are dimmed.

    Attributes:
        columns (int): Number of leading image columns affected.
        intensity (float): Multiplier I in (0, 1] applied to those columns.
    """

    columns: int
    intensity: float

    def __str__(self) -> str:
        return f'cols={self.columns},factor={self.intensity:g}'
