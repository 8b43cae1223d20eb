"""
This module defines evaluation reports.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from entities.dataset import ShadowSpec


@dataclass(frozen=True)
class EvalReport:
    """
    Accuracy of a model on one dataset.

    Attributes:
        dataset_name (str): Name of the evaluated dataset.
        top1_error (float): Percent of samples whose label is not the argmax.
        top5_error (float): Percent of samples whose label is not in the top five.
        per_class_errors (np.ndarray): Top-1 error in percent per class
            (NaN for classes with no samples).
        n_samples (int): Number of evaluated images.
        shadow_spec (Optional[ShadowSpec]): Shadow applied before inference.
        scale (float): Uniform illumination factor applied before inference.
    """

    dataset_name: str
    top1_error: float
    top5_error: float
    per_class_errors: np.ndarray
    n_samples: int
    shadow_spec: Optional[ShadowSpec] = None
    scale: float = 1.0


@dataclass(frozen=True)
class TransferReport:
    """
    Repeated top-layer retraining on a target dataset with imported filters.

    Attributes:
        reports (List[EvalReport]): One report per seeded run.
        seeds (List[int]): Seed of each run.
    """

    reports: List[EvalReport] = field(default_factory=list)
    seeds: List[int] = field(default_factory=list)

    @property
    def mean_top1_error(self) -> float:
        """
        Mean top-1 error over runs.
        """
        return float(np.mean([report.top1_error for report in self.reports]))

    @property
    def std_top1_error(self) -> float:
        """
        Sample standard deviation of the top-1 error (0 for a single run).
        """
        if len(self.reports) < 2:
            return 0.0
        return float(np.std([report.top1_error for report in self.reports], ddof=1))
