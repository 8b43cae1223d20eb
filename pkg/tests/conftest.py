"""
Shared fixtures for the test suite.
"""

import os
from pathlib import Path

import numpy as np
import pytest

from repositories.dataset_repository import save_cifar10_binary
from tests.helpers import make_dataset

CIFAR_DIR = os.getenv('NNL_CIFAR_DIR')


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def cifar_files(tmp_path: Path):
    """
    A 40-image training file and a 20-image test file in CIFAR-10 layout.
    """
    train_path = tmp_path / 'train.bin'
    test_path = tmp_path / 'test.bin'
    save_cifar10_binary(make_dataset(40, seed=1), train_path)
    save_cifar10_binary(make_dataset(20, seed=2), test_path)
    return train_path, test_path


@pytest.fixture
def cifar_dir():
    if not CIFAR_DIR:
        pytest.skip('NNL_CIFAR_DIR is not set')
    return Path(CIFAR_DIR)
