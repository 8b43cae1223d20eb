"""
This module defines the supervised training types.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

import numpy as np


class ScheduleKind(Enum):
    """
    Supported learning-rate schedules.
    """

    CIFAR_70 = 'cifar_70'
    IMAGENET_48 = 'imagenet_48'
    LINEAR = 'linear'
    CONSTANT = 'constant'


@dataclass(frozen=True)
class LrSchedule:
    """
    Learning rate as a function of the 1-based epoch.

    Attributes:
        kind (ScheduleKind): Schedule family.
        base_lr (float): Starting rate for 'linear' and 'constant'.
        epochs (Optional[int]): Length of 'linear' and 'constant' schedules;
            None leaves 'constant' unbounded.
    """

    kind: ScheduleKind
    base_lr: float = 1e-4
    epochs: Optional[int] = None


@dataclass(frozen=True)
class SupervisedConfig:
    """
    Hyperparameters of a gradient-based training run.

    Attributes:
        epochs (int): Passes over the training set.
        minibatch_size (int): Images per Adam step.
        schedule (LrSchedule): Learning-rate schedule.
        weight_scale (float): Multiplier of the 1/sqrt(fan_in) init std.
    """

    epochs: int = 70
    minibatch_size: int = 300
    schedule: LrSchedule = LrSchedule(ScheduleKind.CIFAR_70)
    weight_scale: float = 1.0


@dataclass
class AdamState:
    """
    Moments of the Adam optimizer, one array per parameter name.

    Attributes:
        first_moment (Dict[str, np.ndarray]): Running mean of gradients.
        second_moment (Dict[str, np.ndarray]): Running mean of squared gradients.
        step_count (int): Steps taken so far.
        beta1 (float): Decay of the first moment.
        beta2 (float): Decay of the second moment.
        eps_hat (float): Denominator floor.
    """

    first_moment: Dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: Dict[str, np.ndarray] = field(default_factory=dict)
    step_count: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps_hat: float = 1e-8


@dataclass(frozen=True)
class EpochLog:
    """
    One row of the training log.

    Attributes:
        epoch (int): 1-based epoch.
        lr (float): Learning rate used.
        train_error (float): Top-1 error in percent on the training minibatches.
        test_error (Optional[float]): Top-1 error in percent on the test set.
        loss (float): Mean training cross-entropy.
    """

    epoch: int
    lr: float
    train_error: float
    test_error: Optional[float]
    loss: float
