"""
This module defines the patch types fed to the Hebbian trainer.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PatchBatch:
    """
    A minibatch of flattened W x W x 3 patches.

    Attributes:
        patches (np.ndarray): float array (batch_size, W*W*3), planar order.
        window (int): Patch side W.
        normalized (bool): True once every row was scaled to unit norm.
        ids (np.ndarray): Flat patch ids the rows were gathered from.
    """

    patches: np.ndarray
    window: int
    normalized: bool = False
    ids: np.ndarray = None

    def __len__(self) -> int:
        return int(self.patches.shape[0])


@dataclass(frozen=True)
class PatchSource:
    """
    Every W x W patch of a stack of images, addressed by flat id.

    Patch id p maps to image p // per_image, then row-major position
    within the image. Patches are gathered only when a minibatch needs them.

    Attributes:
        images (np.ndarray): float32 array (n, 3, H, W) scaled to [0, 1].
        window (int): Patch side W.
        stride (int): Step between neighbouring patches.
    """

    images: np.ndarray
    window: int
    stride: int = 1

    @property
    def positions_per_side(self) -> int:
        """
        Patch positions along one image side.
        """
        return (int(self.images.shape[-1]) - self.window) // self.stride + 1

    @property
    def per_image(self) -> int:
        """
        Patches cut from one image.
        """
        return self.positions_per_side ** 2

    @property
    def count(self) -> int:
        """
        Total number of patches.
        """
        return int(self.images.shape[0]) * self.per_image

    @property
    def n_inputs(self) -> int:
        """
        Length N = W*W*3 of a flattened patch.
        """
        return self.window * self.window * int(self.images.shape[1])
