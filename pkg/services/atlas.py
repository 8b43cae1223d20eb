"""
Service module for rendering filter banks as color images.
"""

import math
from pathlib import Path
from typing import Union

import numpy as np
import structlog
from matplotlib import image as mpimage

from entities.filter_bank import FilterBank
from validations.base import BaseValidation
from validations.errors import ConfigurationError, FormatError

log = structlog.get_logger()

ATLAS_ORDERS = ('wins', 'index')
DEGENERATE_GRAY = 128
SEPARATOR_VALUE = 0


def stretch_filter(weights: np.ndarray, window: int) -> np.ndarray:
    """
    One filter as an interleaved (W, W, 3) uint8 tile.

    The three channels share one linear map taking the filter's minimum to 0
    and its maximum to 255; a constant filter becomes mid gray.

    Args:
        weights (np.ndarray): (W*W*3,) filter in planar order.
        window (int): Filter side W.

    Returns:
        np.ndarray: The tile.
    """

    tile = np.asarray(weights, dtype=np.float64).reshape(3, window, window).transpose(1, 2, 0)
    low, high = tile.min(), tile.max()
    if high == low:
        return np.full(tile.shape, DEGENERATE_GRAY, dtype=np.uint8)

    stretched = np.floor((tile - low) / (high - low) * 255 + 0.5)
    return np.clip(stretched, 0, 255).astype(np.uint8)


def atlas_order(bank: FilterBank, order: str = 'wins') -> np.ndarray:
    """
    Filter indices in display order: most wins first, or plain index order.

    Raises:
        ConfigurationError: On an unknown order.
    """

    if order not in ATLAS_ORDERS:
        BaseValidation.abort_with_error(
            ConfigurationError, f'order must be one of {ATLAS_ORDERS}, got {order!r}.', 'order')
    if order == 'index':
        return np.arange(bank.channels)
    return np.argsort(-bank.win_counts.astype(np.int64), kind='stable')


def render_filter_atlas(bank: FilterBank, columns: int, order: str = 'wins') -> np.ndarray:
    """
    Tile every filter into a grid separated by 1-pixel black lines.

    Args:
        bank (FilterBank): The filters.
        columns (int): Tiles per grid row.
        order (str): 'wins' or 'index'.

    Returns:
        np.ndarray: (H, W, 3) uint8 image.
    """

    BaseValidation.validate_positive_int(columns, 'columns')
    window = bank.window
    rows = math.ceil(bank.channels / columns)
    step = window + 1
    atlas = np.full((rows * step - 1, columns * step - 1, 3), SEPARATOR_VALUE, dtype=np.uint8)

    for slot, filter_index in enumerate(atlas_order(bank, order)):
        row, col = divmod(slot, columns)
        atlas[row * step:row * step + window, col * step:col * step + window] = \
            stretch_filter(bank.weights[filter_index], window)
    return atlas


def export_filter_atlas(bank: FilterBank, columns: int, out_path: Union[str, Path],
                        order: str = 'wins') -> Path:
    """
    Write the filter atlas as a PNG file.

    The payload carries no timestamp or software tag, so the same bank
    always produces the same bytes.

    Raises:
        FormatError: If the file cannot be written.
    """

    atlas = render_filter_atlas(bank, columns, order)
    out_path = Path(out_path)
    try:
        mpimage.imsave(out_path, atlas, format='png', metadata={'Software': None})
    except OSError as error:
        BaseValidation.abort_with_error(FormatError, str(error), str(out_path))

    log.info('filter atlas written', path=str(out_path), filters=bank.channels,
             columns=columns, height=atlas.shape[0], width=atlas.shape[1])
    return out_path
