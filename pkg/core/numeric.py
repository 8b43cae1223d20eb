"""
Dense matrix kernels shared by the trainers and the forward passes.

Matrices are C-contiguous numpy arrays. float32 is used for training and
inference; passing float64 inputs runs the same code in double precision,
which is what the finite-difference gradient checks rely on.
"""

from typing import Union

import numpy as np
import numpy.typing as npt

from core.parallel import chunk_bounds, ordered_map
from settings import THREADS
from validations.base import BaseValidation
from validations.errors import ConfigurationError

Matrix = npt.NDArray[np.floating]

NORM_FLOOR = 1e-8
PROBABILITY_FLOOR = 1e-12
GEMM_BLOCK_ROWS = 2048


def gemm(a: Matrix, b: Matrix, trans_a: bool = False, trans_b: bool = False,
         n_jobs: int = THREADS) -> Matrix:
    """
    Matrix product op(a) @ op(b).

    Output rows are computed in blocks of GEMM_BLOCK_ROWS. Block
    boundaries depend only on the row count, so every output element is
    produced by the same call with the same shapes whatever the thread
    count, and repeated calls are bit identical.

    Args:
        a (Matrix): Left operand.
        b (Matrix): Right operand.
        trans_a (bool): Use a transposed.
        trans_b (bool): Use b transposed.
        n_jobs (int): Threads used for the row blocks.

    Returns:
        Matrix: The product, in the wider of the two input dtypes.

    Raises:
        ConfigurationError: If the inner dimensions do not agree.
    """
    left = a.T if trans_a else a
    right = b.T if trans_b else b
    BaseValidation.validate_inner_dimensions(left.shape[1], right.shape[0], 'gemm')

    rows = left.shape[0]
    if rows <= GEMM_BLOCK_ROWS:
        return np.ascontiguousarray(left @ right)

    blocks = ordered_map(lambda rows_slice: left[rows_slice] @ right,
                         chunk_bounds(rows, GEMM_BLOCK_ROWS), n_jobs)
    return np.concatenate(blocks, axis=0)


def rectified_power(x: Union[float, np.ndarray], n: int) -> Union[float, np.ndarray]:
    """
    ReLU(x) ** n.

    Args:
        x (float | np.ndarray): Input value(s).
        n (int): Positive integer exponent.

    Returns:
        float | np.ndarray: 0 where x <= 0, x ** n elsewhere.
    """
    BaseValidation.validate_positive_int(n, 'power')
    result = np.maximum(x, 0) ** n
    if np.ndim(result) == 0:
        return float(result)
    return result


def l2_normalize(v: np.ndarray, axis: int = -1) -> np.ndarray:
    """
    Scale vectors to unit Euclidean norm along an axis.

    Vectors whose norm is below NORM_FLOOR (an all-black patch) become
    exactly zero.

    Args:
        v (np.ndarray): A vector or a stack of vectors.
        axis (int): Axis holding the vector components.

    Returns:
        np.ndarray: Array of the same shape and dtype.
    """
    v = np.asarray(v)
    if not np.issubdtype(v.dtype, np.floating):
        v = v.astype(np.float32)

    norms = np.sqrt(np.sum(v * v, axis=axis, keepdims=True))
    safe = np.where(norms < NORM_FLOOR, 1, norms)
    return np.where(norms < NORM_FLOOR, 0, v / safe).astype(v.dtype, copy=False)


def softmax(logits: np.ndarray, axis: int = -1) -> np.ndarray:
    """
    Numerically stable softmax with max subtraction.

    Args:
        logits (np.ndarray): Finite logits, a vector or rows of vectors.
        axis (int): Class axis.

    Returns:
        np.ndarray: Probabilities summing to one along `axis`.
    """
    logits = np.asarray(logits)
    shifted = logits - np.max(logits, axis=axis, keepdims=True)
    exp = np.exp(shifted)
    return exp / np.sum(exp, axis=axis, keepdims=True)


def _check_labels(labels: np.ndarray, classes: int) -> None:
    if np.any(labels < 0) or np.any(labels >= classes):
        BaseValidation.abort_with_error(
            ConfigurationError, f'label outside [0, {classes}).', 'label')


def cross_entropy(probs: np.ndarray, labels) -> Union[float, np.ndarray]:
    """
    Negative log-likelihood of the true class.

    Args:
        probs (np.ndarray): Softmax output, a vector or a batch of rows.
        labels (int | np.ndarray): Class index or one index per row.

    Returns:
        float | np.ndarray: -log(max(probs[label], 1e-12)), per row for batches.

    Raises:
        ConfigurationError: If a label is out of range.
    """
    probs = np.asarray(probs)
    labels = np.asarray(labels, dtype=np.int64)
    _check_labels(labels, probs.shape[-1])

    if probs.ndim == 1:
        return float(-np.log(max(probs[int(labels)], PROBABILITY_FLOOR)))

    picked = probs[np.arange(probs.shape[0]), labels]
    return -np.log(np.maximum(picked, PROBABILITY_FLOOR))


def cross_entropy_grad(probs: np.ndarray, labels) -> np.ndarray:
    """
    Gradient of the cross-entropy loss with respect to the logits.

    Args:
        probs (np.ndarray): Softmax output, a vector or a batch of rows.
        labels (int | np.ndarray): True class index or indices.

    Returns:
        np.ndarray: probs - one_hot(labels), same shape as probs.
    """
    probs = np.asarray(probs)
    labels = np.asarray(labels, dtype=np.int64)
    _check_labels(labels, probs.shape[-1])

    grad = probs.copy()
    if grad.ndim == 1:
        grad[int(labels)] -= 1
    else:
        grad[np.arange(grad.shape[0]), labels] -= 1
    return grad
