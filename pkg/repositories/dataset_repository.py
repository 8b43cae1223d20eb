"""
Repository module for image dataset files.

Two layouts are supported:

* CIFAR-10 binary: records of 1 label byte followed by 1024 R, 1024 G
  and 1024 B bytes, row-major per channel, no header.
* RAWI: magic b'RAWI', u32 LE count, u32 LE class_count, u8 label_bytes
  (1 or 2), then `count` records of a little-endian label and 3072 planar
  pixel bytes.
"""

import os
import pickle
import struct
from pathlib import Path
from typing import Iterable, List, Sequence, Union

import numpy as np
import structlog

from entities.dataset import COLOR_CHANNELS, IMAGE_SIDE, ImageDataset
from validations.base import BaseValidation
from validations.dataset_validation import (
    CIFAR10_CLASSES,
    CIFAR10_RECORD_BYTES,
    DatasetValidation,
)
from validations.errors import ConfigurationError, FormatError

log = structlog.get_logger()

PIXEL_BYTES = COLOR_CHANNELS * IMAGE_SIDE * IMAGE_SIDE
RAW_MAGIC = b'RAWI'
RAW_HEADER = struct.Struct('<4sIIB')

PathLike = Union[str, os.PathLike]


def _raw_record_dtype(label_bytes: int) -> np.dtype:
    label = '<u2' if label_bytes == 2 else 'u1'
    return np.dtype([('label', label), ('pixels', 'u1', (PIXEL_BYTES,))])


def _planar(pixels: np.ndarray) -> np.ndarray:
    return pixels.reshape(-1, COLOR_CHANNELS, IMAGE_SIDE, IMAGE_SIDE)


def load_cifar10_binary(path: PathLike) -> ImageDataset:
    """
    Loads one CIFAR-10 binary batch file.

    Args:
        path (PathLike): The batch file.

    Returns:
        ImageDataset: One image per 3073-byte record, pixels byte exact.

    Raises:
        FormatError: If the size is not a multiple of 3073 or a label is >= 10.
    """

    raw = np.fromfile(path, dtype=np.uint8)
    DatasetValidation.validate_record_stream(raw.size, CIFAR10_RECORD_BYTES, str(path))

    records = raw.reshape(-1, CIFAR10_RECORD_BYTES)
    labels = records[:, 0].astype(np.int64)
    DatasetValidation.validate_labels(labels, CIFAR10_CLASSES, str(path))

    images = _planar(np.ascontiguousarray(records[:, 1:]))
    return ImageDataset(images=images, labels=labels,
                        class_count=CIFAR10_CLASSES, name=Path(path).stem)


def save_cifar10_binary(dataset: ImageDataset, path: PathLike) -> None:
    """
    Writes a dataset in the CIFAR-10 binary layout.

    Raises:
        ConfigurationError: If the dataset has more than 10 classes.
    """

    if dataset.class_count > CIFAR10_CLASSES:
        BaseValidation.abort_with_error(
            ConfigurationError, 'CIFAR-10 records hold labels below 10 only.', 'class_count')

    records = np.empty((len(dataset), CIFAR10_RECORD_BYTES), dtype=np.uint8)
    records[:, 0] = dataset.labels
    records[:, 1:] = dataset.images.reshape(len(dataset), -1)
    records.tofile(path)


def load_raw(path: PathLike) -> ImageDataset:
    """
    Loads a RAWI file.

    Raises:
        FormatError: On a bad magic, label width, record count or label.
    """

    data = Path(path).read_bytes()
    if len(data) < RAW_HEADER.size:
        BaseValidation.abort_with_error(FormatError, 'truncated header.', str(path))

    magic, count, class_count, label_bytes = RAW_HEADER.unpack_from(data)
    if magic != RAW_MAGIC:
        BaseValidation.abort_with_error(FormatError, f'bad magic {magic!r}.', str(path))
    if label_bytes not in (1, 2):
        BaseValidation.abort_with_error(
            FormatError, f'label_bytes must be 1 or 2, got {label_bytes}.', str(path))

    dtype = _raw_record_dtype(label_bytes)
    body = len(data) - RAW_HEADER.size
    if body != count * dtype.itemsize:
        BaseValidation.abort_with_error(
            FormatError, f'expected {count} records, found {body / dtype.itemsize:g}.',
            str(path))

    records = np.frombuffer(data, dtype=dtype, count=count, offset=RAW_HEADER.size)
    labels = records['label'].astype(np.int64)
    DatasetValidation.validate_labels(labels, class_count, str(path))

    return ImageDataset(images=_planar(records['pixels'].copy()), labels=labels,
                        class_count=int(class_count), name=Path(path).stem)


def save_raw(dataset: ImageDataset, path: PathLike) -> None:
    """
    Writes a dataset in the RAWI layout, with 2-byte labels above 256 classes.
    """

    label_bytes = 1 if dataset.class_count <= 256 else 2
    records = np.empty(len(dataset), dtype=_raw_record_dtype(label_bytes))
    records['label'] = dataset.labels
    records['pixels'] = dataset.images.reshape(len(dataset), -1)

    with open(path, 'wb') as handle:
        handle.write(RAW_HEADER.pack(RAW_MAGIC, len(dataset), dataset.class_count, label_bytes))
        handle.write(records.tobytes())


def resolve_path(path: PathLike, data_dir: str = None) -> Path:
    """
    Resolve a relative data path against a data directory.
    """

    resolved = Path(path)
    if data_dir and not resolved.is_absolute():
        resolved = Path(data_dir) / resolved
    return resolved


def load_dataset(paths: Sequence[PathLike], fmt: str = 'cifar10', name: str = None,
                 data_dir: str = None) -> ImageDataset:
    """
    Loads and concatenates several batch files of one format.

    Args:
        paths (Sequence[PathLike]): Batch files, concatenated in order.
        fmt (str): 'cifar10' or 'raw'.
        name (str): Name of the result; defaults to the first file's stem.
        data_dir (str): Root for relative paths.

    Returns:
        ImageDataset: All records.

    Raises:
        ConfigurationError: If no path is given or the format is unknown.
        FormatError: If a file is malformed or class counts disagree.
    """

    if not paths:
        BaseValidation.abort_with_error(ConfigurationError, 'no data file given.', 'data')

    loaders = {'cifar10': load_cifar10_binary, 'raw': load_raw}
    if fmt not in loaders:
        BaseValidation.abort_with_error(
            ConfigurationError, f'unknown format {fmt!r}.', 'format')

    parts = [loaders[fmt](resolve_path(path, data_dir)) for path in paths]
    class_counts = {part.class_count for part in parts}
    if len(class_counts) != 1:
        BaseValidation.abort_with_error(
            FormatError, f'files disagree on class count: {sorted(class_counts)}.', 'data')

    dataset = ImageDataset(
        images=np.concatenate([part.images for part in parts]),
        labels=np.concatenate([part.labels for part in parts]),
        class_count=parts[0].class_count,
        name=name or parts[0].name)

    log.info('dataset loaded', name=dataset.name, images=len(dataset),
             classes=dataset.class_count, files=len(parts))
    return dataset


def _unpickle(path: PathLike) -> dict:
    # Batch files are pickles; only open files from a trusted download.
    with open(path, 'rb') as handle:
        batch = pickle.load(handle, encoding='bytes')
    return {key.decode() if isinstance(key, bytes) else key: value
            for key, value in batch.items()}


def convert_imagenet32_batches(paths: Iterable[PathLike], out_path: PathLike,
                               class_count: int = 1000) -> ImageDataset:
    """
    Converts pickled ImageNet 32x32 batches into one RAWI file.

    Each batch holds `data` (N x 3072 uint8, planar) and 1-based `labels`.

    Args:
        paths (Iterable[PathLike]): Pickled batch files.
        out_path (PathLike): Destination RAWI file.
        class_count (int): Number of classes.

    Returns:
        ImageDataset: The converted dataset.

    Raises:
        FormatError: If a batch lacks its keys or has a bad pixel row length.
    """

    images: List[np.ndarray] = []
    labels: List[np.ndarray] = []
    for path in paths:
        batch = _unpickle(path)
        if 'data' not in batch or 'labels' not in batch:
            BaseValidation.abort_with_error(
                FormatError, 'batch must contain data and labels.', str(path))

        data = np.asarray(batch['data'], dtype=np.uint8)
        if data.ndim != 2 or data.shape[1] != PIXEL_BYTES:
            BaseValidation.abort_with_error(
                FormatError, f'pixel rows must hold {PIXEL_BYTES} bytes.', str(path))

        images.append(_planar(data))
        labels.append(np.asarray(batch['labels'], dtype=np.int64) - 1)

    dataset = ImageDataset(images=np.concatenate(images), labels=np.concatenate(labels),
                           class_count=class_count, name=Path(out_path).stem)
    DatasetValidation.validate_labels(dataset.labels, class_count, str(out_path))
    save_raw(dataset, out_path)
    return dataset
