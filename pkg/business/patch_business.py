"""
Business module for patch extraction and minibatch streaming.
"""

from dataclasses import replace
from typing import Iterator

import numpy as np

from core.numeric import l2_normalize
from entities.patches import PatchBatch, PatchSource
from validations.base import BaseValidation
from validations.errors import ConfigurationError


def _validate_window(side: int, window: int, stride: int) -> None:
    BaseValidation.validate_positive_int(window, 'window')
    BaseValidation.validate_positive_int(stride, 'stride')
    if window > side:
        BaseValidation.abort_with_error(
            ConfigurationError, f'window {window} exceeds image side {side}.', 'window')


def output_side(side: int, window: int, stride: int) -> int:
    """
    Number of window positions along one side: floor((side - window) / stride) + 1.
    """

    _validate_window(side, window, stride)
    return (side - window) // stride + 1


def extract_patches_batch(images: np.ndarray, window: int, stride: int = 1) -> np.ndarray:
    """
    im2col over a stack of planar images.

    Args:
        images (np.ndarray): (n, C, H, W) array.
        window (int): Patch side.
        stride (int): Step between patch positions.

    Returns:
        np.ndarray: (n, out, out, C*window*window) patches; each patch is
            flattened channel-major, row-major within a channel.

    Raises:
        ConfigurationError: If window exceeds the image side.
    """

    n, channels, side = images.shape[0], images.shape[1], images.shape[-1]
    out = output_side(side, window, stride)

    windows = np.lib.stride_tricks.sliding_window_view(images, (window, window), axis=(2, 3))
    windows = windows[:, :, ::stride, ::stride][:, :, :out, :out]
    # (n, C, out, out, W, W) -> (n, out, out, C, W, W)
    return windows.transpose(0, 2, 3, 1, 4, 5).reshape(
        n, out, out, channels * window * window)


def extract_patches(image: np.ndarray, window: int, stride: int = 1) -> np.ndarray:
    """
    All patches of one planar (C, H, W) image as rows of a matrix.

    Returns:
        np.ndarray: (out*out, C*window*window), row-major over patch positions.
    """

    patches = extract_patches_batch(image[np.newaxis], window, stride)
    return patches.reshape(-1, patches.shape[-1])


def make_patch_source(images: np.ndarray, window: int, stride: int = 1) -> PatchSource:
    """
    Index every patch of a stack of float images without copying them.

    Raises:
        ConfigurationError: If window exceeds the image side.
    """

    _validate_window(int(images.shape[-1]), window, stride)
    return PatchSource(images=images, window=window, stride=stride)


def gather_patches(source: PatchSource, ids: np.ndarray) -> np.ndarray:
    """
    Materialize the patches with the given flat ids.

    Args:
        source (PatchSource): Indexed patch set.
        ids (np.ndarray): Flat patch ids.

    Returns:
        np.ndarray: (len(ids), N) float patches in planar order.
    """

    window = source.window
    image, position = np.divmod(ids, source.per_image)
    row, col = np.divmod(position, source.positions_per_side)
    row = (row * source.stride)[:, None, None, None]
    col = (col * source.stride)[:, None, None, None]

    channel = np.arange(source.images.shape[1])[None, :, None, None]
    dy = np.arange(window)[None, None, :, None]
    dx = np.arange(window)[None, None, None, :]

    patches = source.images[image[:, None, None, None], channel, row + dy, col + dx]
    return patches.reshape(len(ids), source.n_inputs)


def epoch_permutation(count: int, seed: int, epoch: int) -> np.ndarray:
    """
    Permutation of range(count) determined by (seed, epoch) only.
    """

    return np.random.default_rng([epoch, seed]).permutation(count)


def epoch_stream(source: PatchSource, minibatch_size: int, seed: int,
                 epoch: int) -> Iterator[PatchBatch]:
    """
    Shuffled minibatches covering every patch exactly once.

    Args:
        source (PatchSource): Indexed patch set.
        minibatch_size (int): Patches per batch; the last batch may be shorter.
        seed (int): Root seed.
        epoch (int): Epoch number, mixed into the permutation seed.

    Yields:
        PatchBatch: Unnormalized batches.
    """

    BaseValidation.validate_positive_int(minibatch_size, 'minibatch_size')
    order = epoch_permutation(source.count, seed, epoch)

    for start in range(0, source.count, minibatch_size):
        ids = order[start:start + minibatch_size]
        yield PatchBatch(patches=gather_patches(source, ids), window=source.window,
                         normalized=False, ids=ids)


def normalize_batch(batch: PatchBatch) -> PatchBatch:
    """
    Scale every patch to unit norm (all-black patches stay zero).
    """

    return replace(batch, patches=l2_normalize(batch.patches, axis=1), normalized=True)
