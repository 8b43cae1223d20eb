"""
Repository module for filter bank files (.nnlf).

Layout, all little endian: magic b'NNLF', u32 version (1), u32 K, u32 W,
u32 color channels (3), u32 dtype code (0 = f32), K*W*W*3 f32 weights
row-major (planar order inside a row), then K u64 win counts.
"""

import io
import struct
from pathlib import Path
from typing import BinaryIO, Union

import numpy as np

from entities.filter_bank import FilterBank
from validations.base import BaseValidation
from validations.errors import FormatError
from validations.hebbian_validation import HebbianValidation

BANK_MAGIC = b'NNLF'
BANK_VERSION = 1
BANK_HEADER = struct.Struct('<4sIIIII')
DTYPE_F32 = 0
COLOR_CHANNELS = 3


def write_filter_bank(bank: FilterBank, handle: BinaryIO) -> None:
    """
    Writes a bank to an open binary stream.

    Args:
        bank (FilterBank): The bank to write.
        handle (BinaryIO): Destination stream.
    """

    HebbianValidation.validate_bank(bank)
    handle.write(BANK_HEADER.pack(BANK_MAGIC, BANK_VERSION, bank.channels, bank.window,
                                  COLOR_CHANNELS, DTYPE_F32))
    handle.write(np.ascontiguousarray(bank.weights, dtype='<f4').tobytes())
    handle.write(np.ascontiguousarray(bank.win_counts, dtype='<u8').tobytes())


def _read_exact(handle: BinaryIO, size: int, source: str) -> bytes:
    data = handle.read(size)
    if len(data) != size:
        BaseValidation.abort_with_error(FormatError, 'unexpected end of file.', source)
    return data


def read_filter_bank(handle: BinaryIO, source: str = 'filter bank') -> FilterBank:
    """
    Reads one bank from an open binary stream.

    Args:
        handle (BinaryIO): Source stream positioned at the magic.
        source (str): Name used in error messages.

    Returns:
        FilterBank: The bank; seed and epoch count are not stored and read as 0.

    Raises:
        FormatError: On a bad magic, version, channel count, dtype or size.
    """

    magic, version, channels, window, colors, dtype = BANK_HEADER.unpack(
        _read_exact(handle, BANK_HEADER.size, source))

    if magic != BANK_MAGIC:
        BaseValidation.abort_with_error(FormatError, f'bad magic {magic!r}.', source)
    if version != BANK_VERSION:
        BaseValidation.abort_with_error(FormatError, f'unsupported version {version}.', source)
    if colors != COLOR_CHANNELS or dtype != DTYPE_F32:
        BaseValidation.abort_with_error(
            FormatError, f'unsupported channels/dtype {colors}/{dtype}.', source)

    n_inputs = window * window * colors
    weights = np.frombuffer(_read_exact(handle, channels * n_inputs * 4, source), dtype='<f4')
    win_counts = np.frombuffer(_read_exact(handle, channels * 8, source), dtype='<u8')

    return FilterBank(weights=weights.reshape(channels, n_inputs).astype(np.float32),
                      window=window, win_counts=win_counts.astype(np.uint64))


def save_filter_bank(bank: FilterBank, path: Union[str, Path]) -> None:
    """
    Writes a bank to a .nnlf file.
    """

    with open(path, 'wb') as handle:
        write_filter_bank(bank, handle)


def load_filter_bank(path: Union[str, Path]) -> FilterBank:
    """
    Reads a bank from a .nnlf file.

    Raises:
        FormatError: If the file is malformed or has trailing bytes.
    """

    data = Path(path).read_bytes()
    handle = io.BytesIO(data)
    bank = read_filter_bank(handle, str(path))

    if handle.tell() != len(data):
        BaseValidation.abort_with_error(FormatError, 'trailing bytes after bank.', str(path))
    return bank
