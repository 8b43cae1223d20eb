"""
This module defines the network layers and block architectures.
"""

from dataclasses import dataclass, field
from enum import IntEnum
from typing import List, Union

import numpy as np

from entities.filter_bank import FilterBank


class BlockType(IntEnum):
    """
    Type tag of a convolutional block, as stored in model files.
    """

    NNL = 0
    CONV = 1


@dataclass
class NnlConvLayer:
    """
    Convolution with per-patch normalization and a rectified power activation.

    Attributes:
        bank (FilterBank): Frozen filters (rows of unit norm once trained).
        power (int): Exponent n of the activation.
        stride (int): Step ST between patch positions.
    """

    bank: FilterBank
    power: int
    stride: int = 1

    @property
    def window(self) -> int:
        """
        Filter side W.
        """
        return self.bank.window

    @property
    def channels(self) -> int:
        """
        Output channels K.
        """
        return self.bank.channels


@dataclass
class ConvLayer:
    """
    Standard convolution with biases and ReLU, no normalization.

    Attributes:
        weights (np.ndarray): (K, W*W*3) filters in planar order.
        biases (np.ndarray): (K,) per-channel bias.
        window (int): Filter side W.
        stride (int): Step ST between patch positions.
    """

    weights: np.ndarray
    biases: np.ndarray
    window: int
    stride: int = 1

    @property
    def channels(self) -> int:
        """
        Output channels K.
        """
        return int(self.weights.shape[0])


@dataclass(frozen=True)
class MaxPoolLayer:
    """
    Max-pooling without padding.

    Attributes:
        window (int): Pooling window W_p.
        stride (int): Pooling stride ST_p.
    """

    window: int
    stride: int


@dataclass
class Block:
    """
    One convolutional layer followed by its pooling layer.
    """

    conv: Union[NnlConvLayer, ConvLayer]
    pool: MaxPoolLayer

    @property
    def block_type(self) -> BlockType:
        """
        NNL or CONV.
        """
        return BlockType.NNL if isinstance(self.conv, NnlConvLayer) else BlockType.CONV


@dataclass
class Classifier:
    """
    Affine softmax classifier on the concatenated pooled features.

    Attributes:
        weights (np.ndarray): (feature_dim, classes).
        biases (np.ndarray): (classes,).
    """

    weights: np.ndarray
    biases: np.ndarray

    @property
    def feature_dim(self) -> int:
        """
        Input dimension D.
        """
        return int(self.weights.shape[0])

    @property
    def classes(self) -> int:
        """
        Number of classes C.
        """
        return int(self.weights.shape[1])


@dataclass
class BlockArchitecture:
    """
    Blocks evaluated side by side on the same image, then one classifier.

    Features are flattened block-major, then channel, then row, then column.

    Attributes:
        blocks (List[Block]): Blocks in concatenation order.
        classifier (Classifier): Top layer.
    """

    blocks: List[Block] = field(default_factory=list)
    classifier: Classifier = None

    @property
    def is_nnl_only(self) -> bool:
        """
        True if every block is an NNL-CONV block.
        """
        return all(block.block_type == BlockType.NNL for block in self.blocks)
