"""
Builders shared by the test modules.
"""

import numpy as np

from entities.dataset import ImageDataset
from entities.filter_bank import FilterBank
from entities.run_config import BlockConfig


def make_dataset(count: int, classes: int = 10, seed: int = 0, side: int = 32,
                 name: str = 'synthetic') -> ImageDataset:
    """
    Random uint8 images with labels cycling through the classes.
    """
    rng = np.random.default_rng(seed)
    images = rng.integers(0, 256, size=(count, 3, side, side), dtype=np.uint8)
    labels = np.arange(count, dtype=np.int64) % classes
    return ImageDataset(images=images, labels=labels, class_count=classes, name=name)


def make_bank(channels: int, window: int, seed: int = 0, unit: bool = True) -> FilterBank:
    """
    Random bank, rows scaled to unit norm by default.
    """
    rng = np.random.default_rng(seed)
    weights = rng.standard_normal((channels, window * window * 3)).astype(np.float32)
    if unit:
        weights /= np.linalg.norm(weights, axis=1, keepdims=True)
    return FilterBank(weights=weights, window=window,
                      win_counts=np.arange(channels, dtype=np.uint64))


def make_block(block_type: str = 'nnl', channels: int = 4, window: int = 4, power: int = 2,
               stride: int = 1, pool_window: int = 11, pool_stride: int = 2,
               delta: float = 0.2, rank_m: int = 2) -> BlockConfig:
    """
    Block settings with small defaults.
    """
    return BlockConfig(type=block_type, channels=channels, window=window, power=power,
                       stride=stride, pool_window=pool_window, pool_stride=pool_stride,
                       delta=delta, rank_m=rank_m)
