"""
This module defines the learned filter bank and its training configuration.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class FilterBank:
    """
    The K x N weight matrix learned by the local rule.

    Attributes:
        weights (np.ndarray): float32 array (K, W*W*3); row mu is the filter
            of channel mu in planar order.
        window (int): Filter side W.
        win_counts (np.ndarray): uint64 count of rank-1 wins per row during
            the final training epoch.
        epochs_trained (int): Epochs run by the trainer.
        seed (int): Seed of the standard-normal initialization.
    """

    weights: np.ndarray
    window: int
    win_counts: np.ndarray
    epochs_trained: int = 0
    seed: int = 0

    @property
    def channels(self) -> int:
        """
        Number of filters K.
        """
        return int(self.weights.shape[0])

    @property
    def n_inputs(self) -> int:
        """
        Filter length N.
        """
        return int(self.weights.shape[1])

    def row_norms(self) -> np.ndarray:
        """
        Euclidean norm of every filter.
        """
        return np.linalg.norm(self.weights.astype(np.float64), axis=1)


@dataclass(frozen=True)
class HebbianConfig:
    """
    Hyperparameters of one filter-bank training run.

    Attributes:
        channels (int): Number of filters K.
        window (int): Patch side W.
        stride (int): Patch extraction stride during training.
        learning_rate (float): Initial rate eps0, annealed linearly to zero.
        epochs (int): Passes over the full patch set.
        rank_m (int): Rank m that receives the anti-Hebbian update.
        anti_hebbian (float): Strength Delta of the anti-Hebbian update.
        minibatch_size (int): Patches per update.
        scale_update_by_max (bool): Divide each update by its largest
            absolute entry before applying eps.
        normalize_patches (bool): Feed unit-norm patches to the rule.
        precision (float): Floor of the max-scaling divisor.
    """

    channels: int
    window: int
    stride: int = 1
    learning_rate: float = 1e-4
    epochs: int = 500
    rank_m: int = 2
    anti_hebbian: float = 0.2
    minibatch_size: int = 1000
    scale_update_by_max: bool = True
    normalize_patches: bool = False
    precision: float = 1e-30

    @property
    def n_inputs(self) -> int:
        """
        Filter length N = W*W*3.
        """
        return self.window * self.window * 3


@dataclass(frozen=True)
class ConvergenceReport:
    """
    How close the winning rows of a bank are to unit norm.

    Attributes:
        winning_rows (int): Rows with at least one final-epoch win.
        converged_rows (int): Winning rows with |norm - 1| < tol.
        converged_fraction (float): converged_rows / winning_rows (0 if none).
        max_deviation (float): Largest |norm - 1| over the winning rows.
        tolerance (float): tol used.
    """

    winning_rows: int
    converged_rows: int
    converged_fraction: float
    max_deviation: float
    tolerance: float
