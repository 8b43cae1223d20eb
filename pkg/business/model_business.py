"""
Business module for forward passes and network construction.

Feature maps are channel-major, (n, K, rows, cols). Block outputs are
flattened channel, then row, then column and concatenated in block order.
"""

from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from business.patch_business import extract_patches_batch, output_side
from core.numeric import gemm, l2_normalize, rectified_power
from core.parallel import chunk_bounds, ordered_map
from entities.filter_bank import FilterBank
from entities.layers import (
    Block,
    BlockArchitecture,
    Classifier,
    ConvLayer,
    MaxPoolLayer,
    NnlConvLayer,
)
from entities.run_config import BlockConfig
from settings import THREADS
from validations.model_validation import ModelValidation

INFERENCE_CHUNK = 64


@dataclass
class BlockCache:
    """
    Intermediate values of one block kept for backpropagation.

    Attributes:
        patches (np.ndarray): (n*rows*cols, N) im2col matrix.
        normalized (bool): True if the patches were scaled to unit norm.
        pre_activation (np.ndarray): (n, K, rows, cols) currents before the
            activation (bias included for CONV blocks).
        argmax (np.ndarray): (n, K, prow, pcol) flat source index of each
            pooled value inside its channel map.
        map_shape (Tuple[int, int]): (rows, cols) of the convolution output.
    """

    patches: np.ndarray
    normalized: bool
    pre_activation: np.ndarray
    argmax: np.ndarray
    map_shape: Tuple[int, int]


@dataclass
class ForwardCache:
    """
    Everything block_forward computed on the way to the logits.
    """

    blocks: List[BlockCache] = field(default_factory=list)
    features: Optional[np.ndarray] = None


def _batched(images: np.ndarray) -> Tuple[np.ndarray, bool]:
    images = np.asarray(images)
    if images.ndim == 3:
        return images[np.newaxis], True
    return images, False


def _to_maps(columns: np.ndarray, n: int, side: int) -> np.ndarray:
    # (n*rows*cols, K) -> (n, K, rows, cols)
    return np.ascontiguousarray(
        columns.reshape(n, side, side, -1).transpose(0, 3, 1, 2))


def _nnl_conv(layer: NnlConvLayer, images: np.ndarray, n_jobs: int):
    n = images.shape[0]
    patches = extract_patches_batch(images, layer.window, layer.stride)
    side = patches.shape[1]
    patches = l2_normalize(patches.reshape(-1, patches.shape[-1]), axis=1)

    currents = _to_maps(gemm(patches, layer.bank.weights, trans_b=True, n_jobs=n_jobs),
                        n, side)
    return rectified_power(currents, layer.power), patches, currents


def _conv(layer: ConvLayer, images: np.ndarray, n_jobs: int):
    n = images.shape[0]
    patches = extract_patches_batch(images, layer.window, layer.stride)
    side = patches.shape[1]
    patches = patches.reshape(-1, patches.shape[-1])

    pre = _to_maps(gemm(patches, layer.weights, trans_b=True, n_jobs=n_jobs) + layer.biases,
                   n, side)
    return np.maximum(pre, 0), patches, pre


def nnl_conv_forward(layer: NnlConvLayer, images: np.ndarray,
                     n_jobs: int = THREADS) -> np.ndarray:
    """
    NNL-CONV layer: normalize each patch, dot with every filter, rectified power.

    Args:
        layer (NnlConvLayer): The layer.
        images (np.ndarray): One (3, H, W) image or a stack (n, 3, H, W).
        n_jobs (int): Threads.

    Returns:
        np.ndarray: (K, rows, cols) or (n, K, rows, cols) activations, in
            [0, 1] for unit-norm filters.

    Raises:
        ConfigurationError: If the window exceeds the image.
    """

    ModelValidation.validate_nnl_layer(layer)
    batch, single = _batched(images)
    activations, _, _ = _nnl_conv(layer, batch, n_jobs)
    return activations[0] if single else activations


def conv_forward(layer: ConvLayer, images: np.ndarray, n_jobs: int = THREADS) -> np.ndarray:
    """
    Standard convolution: raw patch dot product plus bias, then ReLU.

    Args:
        layer (ConvLayer): The layer.
        images (np.ndarray): One (3, H, W) image or a stack (n, 3, H, W).
        n_jobs (int): Threads.

    Returns:
        np.ndarray: (K, rows, cols) or (n, K, rows, cols) activations.
    """

    batch, single = _batched(images)
    activations, _, _ = _conv(layer, batch, n_jobs)
    return activations[0] if single else activations


def maxpool_forward(layer: MaxPoolLayer,
                    feature_map: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Max-pooling without padding.

    Window offsets are visited in row-major order and only a strictly
    larger value replaces the current maximum, so ties resolve to the
    lowest source index.

    Args:
        layer (MaxPoolLayer): Window and stride.
        feature_map (np.ndarray): (K, h, w) or (n, K, h, w).

    Returns:
        Tuple[np.ndarray, np.ndarray]: Pooled map and, for every pooled
            value, the flat index r * w + c of its source in the channel map.

    Raises:
        ConfigurationError: If the window exceeds the map.
    """

    maps, single = _batched(feature_map)
    height, width = maps.shape[-2:]
    ModelValidation.validate_pool(layer.window, layer.stride, min(height, width))

    rows = (height - layer.window) // layer.stride + 1
    cols = (width - layer.window) // layer.stride + 1
    row_starts = (np.arange(rows) * layer.stride)[:, None]
    col_starts = (np.arange(cols) * layer.stride)[None, :]
    row_end = layer.stride * (rows - 1) + 1
    col_end = layer.stride * (cols - 1) + 1

    pooled = None
    argmax = None
    for dy in range(layer.window):
        for dx in range(layer.window):
            candidate = maps[..., dy:dy + row_end:layer.stride, dx:dx + col_end:layer.stride]
            source = (row_starts + dy) * width + (col_starts + dx)
            if pooled is None:
                pooled = candidate.copy()
                argmax = np.broadcast_to(source, candidate.shape).copy()
                continue
            better = candidate > pooled
            pooled = np.where(better, candidate, pooled)
            argmax = np.where(better, source, argmax)

    if single:
        return pooled[0], argmax[0]
    return pooled, argmax


def _block_forward(block: Block, images: np.ndarray, n_jobs: int):
    if isinstance(block.conv, NnlConvLayer):
        ModelValidation.validate_nnl_layer(block.conv)
        activations, patches, pre = _nnl_conv(block.conv, images, n_jobs)
        normalized = True
    else:
        activations, patches, pre = _conv(block.conv, images, n_jobs)
        normalized = False

    pooled, argmax = maxpool_forward(block.pool, activations)
    cache = BlockCache(patches=patches, normalized=normalized, pre_activation=pre,
                       argmax=argmax, map_shape=activations.shape[-2:])
    return pooled.reshape(images.shape[0], -1), cache


def block_forward(arch: BlockArchitecture, images: np.ndarray,
                  n_jobs: int = THREADS) -> Tuple[np.ndarray, ForwardCache]:
    """
    Full forward pass keeping the intermediates needed for backpropagation.

    Args:
        arch (BlockArchitecture): The network.
        images (np.ndarray): (n, 3, H, W) float images (or one (3, H, W) image).
        n_jobs (int): Threads.

    Returns:
        Tuple[np.ndarray, ForwardCache]: (n, classes) logits and the cache.

    Raises:
        ConfigurationError: If the features do not match the classifier.
    """

    batch, _ = _batched(images)
    cache = ForwardCache()
    features = []
    for block in arch.blocks:
        flat, block_cache = _block_forward(block, batch, n_jobs)
        features.append(flat)
        cache.blocks.append(block_cache)

    cache.features = np.concatenate(features, axis=1)
    ModelValidation.validate_feature_dim(arch, cache.features.shape[1])
    logits = gemm(cache.features, arch.classifier.weights, n_jobs=n_jobs) \
        + arch.classifier.biases
    return logits, cache


def block_features(arch: BlockArchitecture, images: np.ndarray,
                   n_jobs: int = 1) -> np.ndarray:
    """
    Concatenated pooled features of a stack of images, without caches.
    """

    batch, _ = _batched(images)
    features = []
    for block in arch.blocks:
        if isinstance(block.conv, NnlConvLayer):
            activations, _, _ = _nnl_conv(block.conv, batch, n_jobs)
        else:
            activations, _, _ = _conv(block.conv, batch, n_jobs)
        pooled, _ = maxpool_forward(block.pool, activations)
        features.append(pooled.reshape(batch.shape[0], -1))
    return np.concatenate(features, axis=1)


def extract_features(arch: BlockArchitecture, images: np.ndarray,
                     chunk: int = INFERENCE_CHUNK, n_jobs: int = THREADS) -> np.ndarray:
    """
    Features of many images, computed in fixed-size chunks of images.
    """

    parts = ordered_map(lambda rows: block_features(arch, images[rows]),
                        chunk_bounds(images.shape[0], chunk), n_jobs)
    return np.concatenate(parts, axis=0)


def predict_logits(arch: BlockArchitecture, images: np.ndarray,
                   chunk: int = INFERENCE_CHUNK, n_jobs: int = THREADS) -> np.ndarray:
    """
    Logits of many images, computed in fixed-size chunks of images.

    Raises:
        ConfigurationError: If the features do not match the classifier.
    """

    def logits_of(rows: slice) -> np.ndarray:
        features = block_features(arch, images[rows])
        ModelValidation.validate_feature_dim(arch, features.shape[1])
        return features @ arch.classifier.weights + arch.classifier.biases

    parts = ordered_map(logits_of, chunk_bounds(images.shape[0], chunk), n_jobs)
    return np.concatenate(parts, axis=0)


def pooled_side(side: int, window: int, stride: int, pool_window: int,
                pool_stride: int) -> int:
    """
    Side of a block's pooled map for a square input of the given side.
    """

    conv_side = output_side(side, window, stride)
    ModelValidation.validate_pool(pool_window, pool_stride, conv_side)
    return (conv_side - pool_window) // pool_stride + 1


def feature_dim(blocks: Sequence[BlockConfig], side: int = 32) -> int:
    """
    Length of the concatenated features: sum of pooled_h * pooled_w * K.
    """

    return sum(pooled_side(side, block.window, block.stride, block.pool_window,
                           block.pool_stride) ** 2 * block.channels
               for block in blocks)


def init_classifier(dimension: int, classes: int, generator: np.random.Generator,
                    weight_scale: float = 1.0, dtype=np.float32) -> Classifier:
    """
    Normal weights with std weight_scale / sqrt(dimension), zero biases.
    """

    std = weight_scale / np.sqrt(dimension)
    return Classifier(
        weights=(generator.standard_normal((dimension, classes)) * std).astype(dtype),
        biases=np.zeros(classes, dtype=dtype))


def build_nnl_architecture(banks: Sequence[FilterBank], blocks: Sequence[BlockConfig],
                           classes: int, seed: int, side: int = 32,
                           weight_scale: float = 1.0) -> BlockArchitecture:
    """
    Network of NNL-CONV blocks using frozen filter banks.

    Args:
        banks (Sequence[FilterBank]): One bank per block, in block order.
        blocks (Sequence[BlockConfig]): Block hyperparameters; CONV entries are skipped.
        classes (int): Classifier outputs.
        seed (int): Seed of the classifier initialization.
        side (int): Input image side.
        weight_scale (float): Multiplier of the classifier init std.

    Returns:
        BlockArchitecture: The network with a freshly initialized classifier.

    Raises:
        ConfigurationError: If banks and blocks do not match.
    """

    ModelValidation.validate_banks_for_blocks(banks, blocks)
    # Pruned banks may hold fewer rows than the block asks for.
    nnl_blocks = [block for block in blocks if block.type == 'nnl']
    blocks = [replace(block, channels=bank.channels) for bank, block in zip(banks, nnl_blocks)]
    layers = [Block(conv=NnlConvLayer(bank=bank, power=block.power, stride=block.stride),
                    pool=MaxPoolLayer(block.pool_window, block.pool_stride))
              for bank, block in zip(banks, blocks)]

    generator = np.random.Generator(np.random.PCG64(seed))
    return BlockArchitecture(
        blocks=layers,
        classifier=init_classifier(feature_dim(blocks, side), classes, generator, weight_scale))


def build_conv_architecture(blocks: Sequence[BlockConfig], classes: int, seed: int,
                            side: int = 32, weight_scale: float = 1.0,
                            dtype=np.float32) -> BlockArchitecture:
    """
    Network of standard CONV blocks for end-to-end training.

    Filters are normal with std weight_scale / sqrt(N), biases zero.
    """

    generator = np.random.Generator(np.random.PCG64(seed))
    layers = []
    for block in blocks:
        n_inputs = block.window * block.window * 3
        weights = generator.standard_normal((block.channels, n_inputs)) \
            * (weight_scale / np.sqrt(n_inputs))
        layers.append(Block(
            conv=ConvLayer(weights=weights.astype(dtype),
                           biases=np.zeros(block.channels, dtype=dtype),
                           window=block.window, stride=block.stride),
            pool=MaxPoolLayer(block.pool_window, block.pool_stride)))

    return BlockArchitecture(
        blocks=layers,
        classifier=init_classifier(feature_dim(blocks, side), classes, generator,
                                   weight_scale, dtype))
