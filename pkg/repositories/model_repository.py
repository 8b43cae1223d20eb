"""
Repository module for model files (.nnlm).

Layout, all little endian: magic b'NNLM', u32 version (1), u32 block count.
Per block: u32 type tag (0 = NNL, 1 = CONV); an NNL block embeds a full
.nnlf filter bank, a CONV block stores u32 K, u32 W, K*W*W*3 f32 weights and
K f32 biases; then u32 n (0 for CONV), u32 ST, u32 W_p, u32 ST_p. The
classifier follows: u32 D, u32 C, D*C f32 weights row-major, C f32 biases.
"""

import io
import struct
from pathlib import Path
from typing import BinaryIO, Union

import numpy as np

from entities.layers import (
    Block,
    BlockArchitecture,
    BlockType,
    Classifier,
    ConvLayer,
    MaxPoolLayer,
    NnlConvLayer,
)
from repositories.filter_bank_repository import (
    _read_exact,
    read_filter_bank,
    write_filter_bank,
)
from validations.base import BaseValidation
from validations.errors import FormatError

MODEL_MAGIC = b'NNLM'
MODEL_VERSION = 1
MODEL_HEADER = struct.Struct('<4sII')
U32 = struct.Struct('<I')
PAIR = struct.Struct('<II')
BLOCK_TAIL = struct.Struct('<IIII')


def _write_floats(handle: BinaryIO, values: np.ndarray) -> None:
    handle.write(np.ascontiguousarray(values, dtype='<f4').tobytes())


def _read_floats(handle: BinaryIO, count: int, source: str) -> np.ndarray:
    data = _read_exact(handle, count * 4, source)
    return np.frombuffer(data, dtype='<f4').astype(np.float32)


def write_model(arch: BlockArchitecture, handle: BinaryIO) -> None:
    """
    Writes a network to an open binary stream.
    """

    handle.write(MODEL_HEADER.pack(MODEL_MAGIC, MODEL_VERSION, len(arch.blocks)))

    for block in arch.blocks:
        handle.write(U32.pack(int(block.block_type)))
        if block.block_type == BlockType.NNL:
            write_filter_bank(block.conv.bank, handle)
            power = block.conv.power
        else:
            handle.write(PAIR.pack(block.conv.channels, block.conv.window))
            _write_floats(handle, block.conv.weights)
            _write_floats(handle, block.conv.biases)
            power = 0
        handle.write(BLOCK_TAIL.pack(power, block.conv.stride, block.pool.window,
                                     block.pool.stride))

    handle.write(PAIR.pack(arch.classifier.feature_dim, arch.classifier.classes))
    _write_floats(handle, arch.classifier.weights)
    _write_floats(handle, arch.classifier.biases)


def read_model(handle: BinaryIO, source: str = 'model') -> BlockArchitecture:
    """
    Reads a network from an open binary stream.

    Raises:
        FormatError: On a bad magic, version, block tag or truncated data.
    """

    magic, version, block_count = MODEL_HEADER.unpack(
        _read_exact(handle, MODEL_HEADER.size, source))
    if magic != MODEL_MAGIC:
        BaseValidation.abort_with_error(FormatError, f'bad magic {magic!r}.', source)
    if version != MODEL_VERSION:
        BaseValidation.abort_with_error(FormatError, f'unsupported version {version}.', source)

    blocks = []
    for _ in range(block_count):
        (tag,) = U32.unpack(_read_exact(handle, U32.size, source))
        if tag == BlockType.NNL:
            bank = read_filter_bank(handle, source)
        elif tag == BlockType.CONV:
            channels, window = PAIR.unpack(_read_exact(handle, PAIR.size, source))
            weights = _read_floats(handle, channels * window * window * 3, source)
            biases = _read_floats(handle, channels, source)
        else:
            BaseValidation.abort_with_error(FormatError, f'unknown block tag {tag}.', source)

        power, stride, pool_window, pool_stride = BLOCK_TAIL.unpack(
            _read_exact(handle, BLOCK_TAIL.size, source))
        conv = NnlConvLayer(bank=bank, power=power, stride=stride) if tag == BlockType.NNL \
            else ConvLayer(weights=weights.reshape(channels, -1), biases=biases,
                           window=window, stride=stride)
        blocks.append(Block(conv=conv, pool=MaxPoolLayer(pool_window, pool_stride)))

    dimension, classes = PAIR.unpack(_read_exact(handle, PAIR.size, source))
    weights = _read_floats(handle, dimension * classes, source).reshape(dimension, classes)
    biases = _read_floats(handle, classes, source)

    return BlockArchitecture(blocks=blocks, classifier=Classifier(weights=weights, biases=biases))


def model_to_bytes(arch: BlockArchitecture) -> bytes:
    """
    Serialized model payload.
    """

    handle = io.BytesIO()
    write_model(arch, handle)
    return handle.getvalue()


def save_model(arch: BlockArchitecture, path: Union[str, Path]) -> None:
    """
    Writes a network to a .nnlm file.
    """

    Path(path).write_bytes(model_to_bytes(arch))


def load_model(path: Union[str, Path]) -> BlockArchitecture:
    """
    Reads a network from a .nnlm file.

    Raises:
        FormatError: If the file is malformed or has trailing bytes.
    """

    data = Path(path).read_bytes()
    handle = io.BytesIO(data)
    arch = read_model(handle, str(path))

    if handle.tell() != len(data):
        BaseValidation.abort_with_error(FormatError, 'trailing bytes after model.', str(path))
    return arch
