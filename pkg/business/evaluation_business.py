"""
Business module for accuracy metrics, the shadow test and transfer learning.
"""

from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np
import structlog

from business.dataset_business import apply_shadow, scale_images, to_float
from business.model_business import build_nnl_architecture, predict_logits
from business.supervised_business import train_top_layer
from entities.dataset import ImageDataset, ShadowSpec
from entities.filter_bank import FilterBank
from entities.layers import BlockArchitecture
from entities.report import EvalReport, TransferReport
from entities.run_config import BlockConfig
from entities.training import SupervisedConfig
from settings import THREADS
from validations.base import BaseValidation
from validations.errors import ConfigurationError

log = structlog.get_logger()

DEFAULT_TRANSFER_RUNS = 5


def top_k_hits(logits: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    """
    Whether each label is among the k largest logits (ties to the lowest class).

    Raises:
        ConfigurationError: If k is not in [1, classes].
    """

    classes = logits.shape[1]
    if not 1 <= k <= classes:
        BaseValidation.abort_with_error(
            ConfigurationError, f'k must lie in [1, {classes}], got {k}.', 'k')

    ranking = np.argsort(-logits, axis=1, kind='stable')[:, :k]
    return np.any(ranking == np.asarray(labels)[:, None], axis=1)


def top_k_error(logits: np.ndarray, labels: np.ndarray, k: int) -> float:
    """
    Percent of samples whose label is not among the k largest logits.

    Args:
        logits (np.ndarray): (n, classes).
        labels (np.ndarray): (n,) true classes.
        k (int): Number of top classes accepted.

    Returns:
        float: Error in percent.
    """

    return float(np.mean(~top_k_hits(logits, labels, k)) * 100)


def _per_class_errors(hits: np.ndarray, labels: np.ndarray, classes: int) -> np.ndarray:
    counts = np.bincount(labels, minlength=classes).astype(np.float64)
    misses = np.bincount(labels, weights=(~hits).astype(np.float64), minlength=classes)
    with np.errstate(invalid='ignore', divide='ignore'):
        return np.where(counts > 0, misses / counts * 100, np.nan)


def evaluate(arch: BlockArchitecture, dataset: ImageDataset, shadow: ShadowSpec = None,
             scale: float = 1.0, n_jobs: int = THREADS) -> EvalReport:
    """
    Top-1 and top-5 errors of a model, optionally under changed illumination.

    The shadow is applied in 8-bit space; the uniform scale is applied to
    the float images afterwards.

    Args:
        arch (BlockArchitecture): The model.
        dataset (ImageDataset): Labeled images.
        shadow (ShadowSpec): Optional shadow.
        scale (float): Uniform illumination factor (> 0).
        n_jobs (int): Threads; the report does not depend on it.

    Returns:
        EvalReport: The metrics.

    Raises:
        ConfigurationError: If class counts disagree or the scale is not positive.
    """

    classes = arch.classifier.classes
    if classes != dataset.class_count:
        BaseValidation.abort_with_error(
            ConfigurationError, f'model has {classes} classes, dataset {dataset.name} '
            f'has {dataset.class_count}.', 'class_count')
    if not scale > 0:
        BaseValidation.abort_with_error(ConfigurationError, 'scale must be positive.', 'scale')

    shown = apply_shadow(dataset, shadow) if shadow is not None else dataset
    images = to_float(shown)
    if scale != 1.0:
        images = scale_images(images, scale)

    logits = predict_logits(arch, images, n_jobs=n_jobs)
    top1 = top_k_hits(logits, dataset.labels, 1)

    report = EvalReport(
        dataset_name=dataset.name,
        top1_error=float(np.mean(~top1) * 100),
        top5_error=top_k_error(logits, dataset.labels, min(5, classes)),
        per_class_errors=_per_class_errors(top1, dataset.labels, classes),
        n_samples=len(dataset),
        shadow_spec=shadow,
        scale=scale)

    log.info('evaluation finished', dataset=dataset.name, top1=round(report.top1_error, 3),
             top5=round(report.top5_error, 3), shadow=str(shadow) if shadow else None,
             scale=scale)
    return report


def compare_shadow(models: Mapping[str, BlockArchitecture], dataset: ImageDataset,
                   shadow: ShadowSpec,
                   n_jobs: int = THREADS) -> Dict[str, Tuple[EvalReport, EvalReport]]:
    """
    Raw and shadowed reports for several models on the same test set.

    Returns:
        Dict[str, Tuple[EvalReport, EvalReport]]: (raw, shadowed) by model name.
    """

    return {name: (evaluate(arch, dataset, n_jobs=n_jobs),
                   evaluate(arch, dataset, shadow, n_jobs=n_jobs))
            for name, arch in models.items()}


def transfer(banks: Sequence[FilterBank], target_train: ImageDataset,
             target_test: ImageDataset, blocks: Sequence[BlockConfig],
             config: SupervisedConfig, seed: int, runs: int = DEFAULT_TRANSFER_RUNS,
             n_jobs: int = THREADS) -> TransferReport:
    """
    Retrain the top layer on a target dataset over imported frozen filters.

    Run r uses seed + r for both the classifier initialization and the
    minibatch order.

    Args:
        banks (Sequence[FilterBank]): Filters learned on the source dataset,
            one per NNL block.
        target_train (ImageDataset): Target training images.
        target_test (ImageDataset): Target evaluation images.
        blocks (Sequence[BlockConfig]): Architecture template.
        config (SupervisedConfig): Top-layer training settings.
        seed (int): Seed of the first run.
        runs (int): Number of seeded runs.
        n_jobs (int): Threads.

    Returns:
        TransferReport: One report per run with mean and std.

    Raises:
        ConfigurationError: If the banks do not fit the template.
    """

    BaseValidation.validate_positive_int(runs, 'runs')
    reports: List[EvalReport] = []
    seeds = [seed + run for run in range(runs)]

    for run_seed in seeds:
        arch = build_nnl_architecture(banks, blocks, target_train.class_count, run_seed,
                                      side=target_train.side)
        train_top_layer(arch, target_train, config, run_seed, n_jobs=n_jobs)
        reports.append(evaluate(arch, target_test, n_jobs=n_jobs))

    result = TransferReport(reports=reports, seeds=seeds)
    log.info('transfer finished', target=target_train.name, runs=runs,
             mean_top1=round(result.mean_top1_error, 3),
             std_top1=round(result.std_top1_error, 3))
    return result
