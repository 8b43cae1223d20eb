"""
Business module for gradient-based training.

NNL networks train their classifier only, on frozen features. CONV
baselines train every parameter by backpropagation. Both use Adam on
minibatch-mean gradients.
"""

from typing import Dict, List, Tuple, Union

import numpy as np
import structlog

from business.dataset_business import to_float
from business.model_business import (
    block_forward,
    block_features,
    extract_features,
    predict_logits,
)
from business.patch_business import epoch_permutation
from core.numeric import cross_entropy, cross_entropy_grad, gemm, softmax
from entities.dataset import ImageDataset
from entities.layers import BlockArchitecture, BlockType
from entities.run_config import ClassifierSection
from entities.training import AdamState, EpochLog, LrSchedule, ScheduleKind, SupervisedConfig
from settings import FEATURE_CACHE_MB, THREADS
from validations.base import BaseValidation
from validations.errors import ConfigurationError, TrainingError

log = structlog.get_logger()

STEP_TABLES = {
    ScheduleKind.CIFAR_70: ((15, 1e-4), (30, 8e-5), (45, 5e-5), (60, 2e-5), (70, 1e-5)),
    ScheduleKind.IMAGENET_48: ((15, 1e-4), (25, 8e-5), (35, 5e-5), (45, 2e-5), (48, 1e-5)),
}

Params = Dict[str, np.ndarray]


def _as_schedule(schedule: Union[LrSchedule, ScheduleKind, str]) -> LrSchedule:
    if isinstance(schedule, LrSchedule):
        return schedule
    try:
        return LrSchedule(ScheduleKind(schedule))
    except ValueError:
        BaseValidation.abort_with_error(
            ConfigurationError, f'unknown schedule {schedule!r}.', 'schedule')
    return None


def lr_schedule(schedule: Union[LrSchedule, ScheduleKind, str], epoch: int) -> float:
    """
    Learning rate of a 1-based epoch.

    Args:
        schedule (LrSchedule | ScheduleKind | str): The schedule or its kind.
        epoch (int): Epoch number, starting at 1.

    Returns:
        float: The learning rate.

    Raises:
        ConfigurationError: If the epoch is below 1 or beyond the schedule.
    """

    schedule = _as_schedule(schedule)
    BaseValidation.validate_positive_int(epoch, 'epoch')

    if schedule.kind in STEP_TABLES:
        for last_epoch, rate in STEP_TABLES[schedule.kind]:
            if epoch <= last_epoch:
                return rate
        BaseValidation.abort_with_error(
            ConfigurationError, f'epoch {epoch} is beyond the {schedule.kind.value} schedule.',
            'epoch')

    if schedule.epochs is not None and epoch > schedule.epochs:
        BaseValidation.abort_with_error(
            ConfigurationError, f'epoch {epoch} is beyond {schedule.epochs} epochs.', 'epoch')

    if schedule.kind == ScheduleKind.LINEAR:
        if schedule.epochs is None:
            BaseValidation.abort_with_error(
                ConfigurationError, 'a linear schedule needs its epoch count.', 'schedule')
        return schedule.base_lr * (1 - (epoch - 1) / schedule.epochs)

    return schedule.base_lr


def adam_step(params: Params, grads: Params, state: AdamState, lr: float) -> Params:
    """
    One bias-corrected Adam update, applied in place.

    Args:
        params (Params): Parameter arrays by name; updated in place.
        grads (Params): Gradients with the same names and shapes.
        state (AdamState): Moments, created lazily on the first step.
        lr (float): Learning rate.

    Returns:
        Params: The updated parameters.

    Raises:
        TrainingError: If a gradient holds NaN or Inf; nothing is updated then.
    """

    for name in sorted(params):
        BaseValidation.validate_finite(grads[name], f'gradient {name}')

    state.step_count += 1
    correction1 = 1 - state.beta1 ** state.step_count
    correction2 = 1 - state.beta2 ** state.step_count

    for name in sorted(params):
        grad = grads[name]
        param = params[name]

        first = state.first_moment.setdefault(name, np.zeros_like(param))
        second = state.second_moment.setdefault(name, np.zeros_like(param))
        first *= state.beta1
        first += (1 - state.beta1) * grad
        second *= state.beta2
        second += (1 - state.beta2) * grad * grad

        step = (first / correction1) / (np.sqrt(second / correction2) + state.eps_hat)
        param -= (lr * step).astype(param.dtype, copy=False)

    return params


def classifier_loss_and_grads(features: np.ndarray, labels: np.ndarray, weights: np.ndarray,
                              biases: np.ndarray) -> Tuple[float, Params, np.ndarray]:
    """
    Mean cross-entropy of a softmax classifier and its gradients.

    Args:
        features (np.ndarray): (B, D) inputs.
        labels (np.ndarray): (B,) class indices.
        weights (np.ndarray): (D, C).
        biases (np.ndarray): (C,).

    Returns:
        Tuple[float, Params, np.ndarray]: Loss, {'weights', 'biases'}
            gradients and the (B, C) probabilities.
    """

    probs = softmax(features @ weights + biases, axis=1)
    loss = float(np.mean(cross_entropy(probs, labels)))
    delta = cross_entropy_grad(probs, labels) / features.shape[0]

    return loss, {'weights': features.T @ delta, 'biases': delta.sum(axis=0)}, probs


def network_params(arch: BlockArchitecture) -> Params:
    """
    Every trainable array of a CONV network by name.
    """

    params = {'classifier.weights': arch.classifier.weights,
              'classifier.biases': arch.classifier.biases}
    for index, block in enumerate(arch.blocks):
        if block.block_type == BlockType.CONV:
            params[f'block{index}.weights'] = block.conv.weights
            params[f'block{index}.biases'] = block.conv.biases
    return params


def _validate_end_to_end(arch: BlockArchitecture) -> None:
    if any(block.block_type == BlockType.NNL for block in arch.blocks):
        BaseValidation.abort_with_error(
            ConfigurationError, 'end-to-end training needs CONV blocks only.', 'architecture')


def network_loss_and_grads(arch: BlockArchitecture, images: np.ndarray, labels: np.ndarray,
                           n_jobs: int = THREADS) -> Tuple[float, Params, np.ndarray]:
    """
    Mean cross-entropy of a CONV network and the gradient of every parameter.

    The classifier gradient is split back into per-block pooled gradients,
    routed through max-pooling to the stored argmax only, masked by the
    ReLU and turned into filter and bias gradients.

    Args:
        arch (BlockArchitecture): CONV-only network.
        images (np.ndarray): (B, 3, H, W) float images.
        labels (np.ndarray): (B,) class indices.
        n_jobs (int): Threads.

    Returns:
        Tuple[float, Params, np.ndarray]: Loss, gradients keyed like
            `network_params`, and the (B, C) probabilities.

    Raises:
        ConfigurationError: If the network has an NNL block.
    """

    _validate_end_to_end(arch)
    logits, cache = block_forward(arch, images, n_jobs)
    batch = images.shape[0]

    probs = softmax(logits, axis=1)
    loss = float(np.mean(cross_entropy(probs, labels)))
    delta = cross_entropy_grad(probs, labels) / batch

    grads = {'classifier.weights': gemm(cache.features, delta, trans_a=True, n_jobs=n_jobs),
             'classifier.biases': delta.sum(axis=0)}
    feature_grads = delta @ arch.classifier.weights.T

    offset = 0
    for index, (block, block_cache) in enumerate(zip(arch.blocks, cache.blocks)):
        channels = block.conv.channels
        pooled_shape = block_cache.argmax.shape
        size = int(np.prod(pooled_shape[1:]))
        pooled_grad = feature_grads[:, offset:offset + size]
        offset += size

        height, width = block_cache.map_shape
        cells = height * width
        maps = batch * channels
        targets = (np.arange(maps)[:, None] * cells
                   + block_cache.argmax.reshape(maps, -1)).ravel()
        map_grad = np.bincount(targets, weights=pooled_grad.ravel(), minlength=maps * cells)
        map_grad = map_grad.reshape(batch, channels, height, width).astype(delta.dtype)

        pre_grad = map_grad * (block_cache.pre_activation > 0)
        columns = pre_grad.transpose(0, 2, 3, 1).reshape(-1, channels)

        grads[f'block{index}.weights'] = gemm(columns, block_cache.patches, trans_a=True,
                                              n_jobs=n_jobs)
        grads[f'block{index}.biases'] = columns.sum(axis=0)

    return loss, grads, probs


def validate_schedule_length(config: SupervisedConfig) -> None:
    """
    Reject more epochs than a step table covers before any training starts.
    """

    schedule = _as_schedule(config.schedule)
    if schedule.kind in STEP_TABLES:
        last_epoch = STEP_TABLES[schedule.kind][-1][0]
        if config.epochs > last_epoch:
            BaseValidation.abort_with_error(
                ConfigurationError, f'{config.epochs} epochs exceed the '
                f'{schedule.kind.value} schedule ({last_epoch} epochs).', 'classifier.epochs')


def _top1_error(logits: np.ndarray, labels: np.ndarray) -> float:
    return float(np.mean(np.argmax(logits, axis=1) != labels) * 100)


def _validate_classes(arch: BlockArchitecture, dataset: ImageDataset) -> None:
    if arch.classifier.classes != dataset.class_count:
        BaseValidation.abort_with_error(
            ConfigurationError, f'model has {arch.classifier.classes} classes, dataset '
            f'{dataset.name} has {dataset.class_count}.', 'class_count')


def _fits_cache(count: int, dimension: int) -> bool:
    return count * dimension * 4 <= FEATURE_CACHE_MB * 2 ** 20


def _finish_epoch(history: List[EpochLog], epoch: int, lr: float, loss_sum: float,
                  errors: int, count: int, test_error: float, kind: str) -> None:
    loss = loss_sum / count
    if not np.isfinite(loss):
        BaseValidation.abort_with_error(
            TrainingError, f'loss became {loss} in epoch {epoch}.', 'loss')

    row = EpochLog(epoch=epoch, lr=lr, train_error=errors / count * 100,
                   test_error=test_error, loss=loss)
    history.append(row)
    log.info(f'{kind} epoch finished', epoch=epoch, lr=lr, loss=round(loss, 5),
             train_error=round(row.train_error, 3),
             test_error=None if test_error is None else round(test_error, 3))


def train_top_layer(arch: BlockArchitecture, train: ImageDataset, config: SupervisedConfig,
                    seed: int, test: ImageDataset = None,
                    n_jobs: int = THREADS) -> Tuple[BlockArchitecture, List[EpochLog]]:
    """
    Train only the classifier on frozen block features.

    Args:
        arch (BlockArchitecture): Network whose blocks stay fixed.
        train (ImageDataset): Training images.
        config (SupervisedConfig): Epochs, batch size and schedule.
        seed (int): Seed of the minibatch order.
        test (ImageDataset): Optional set evaluated after every epoch.
        n_jobs (int): Threads; the result does not depend on it.

    Returns:
        Tuple[BlockArchitecture, List[EpochLog]]: The network (classifier
            updated in place) and one log row per epoch.

    Raises:
        ConfigurationError: If class counts disagree or the schedule is too short.
        TrainingError: If the loss or a gradient stops being finite.
    """

    validate_schedule_length(config)
    _validate_classes(arch, train)
    images = to_float(train)
    labels = train.labels
    dimension = arch.classifier.feature_dim

    cached = _fits_cache(len(train), dimension)
    features = extract_features(arch, images, n_jobs=n_jobs) if cached else None

    test_images = to_float(test) if test is not None else None
    test_features = None
    if test is not None and _fits_cache(len(test), dimension):
        test_features = extract_features(arch, test_images, n_jobs=n_jobs)

    params = {'weights': arch.classifier.weights, 'biases': arch.classifier.biases}
    state = AdamState()
    history: List[EpochLog] = []
    log.info('top layer training started', images=len(train), features=dimension,
             cached=cached, epochs=config.epochs)

    for epoch in range(1, config.epochs + 1):
        lr = lr_schedule(config.schedule, epoch)
        order = epoch_permutation(len(train), seed, epoch)
        loss_sum, errors = 0.0, 0

        for start in range(0, len(train), config.minibatch_size):
            rows = order[start:start + config.minibatch_size]
            batch_features = features[rows] if cached \
                else block_features(arch, images[rows], n_jobs)

            loss, grads, probs = classifier_loss_and_grads(
                batch_features, labels[rows], params['weights'], params['biases'])
            loss_sum += loss * rows.size
            errors += int(np.count_nonzero(np.argmax(probs, axis=1) != labels[rows]))
            adam_step(params, grads, state, lr)

        test_error = None
        if test is not None:
            test_logits = test_features @ params['weights'] + params['biases'] \
                if test_features is not None else predict_logits(arch, test_images, n_jobs=n_jobs)
            test_error = _top1_error(test_logits, test.labels)

        _finish_epoch(history, epoch, lr, loss_sum, errors, len(train), test_error, 'top layer')

    return arch, history


def train_end_to_end(arch: BlockArchitecture, train: ImageDataset, config: SupervisedConfig,
                     seed: int, test: ImageDataset = None,
                     n_jobs: int = THREADS) -> Tuple[BlockArchitecture, List[EpochLog]]:
    """
    Train every parameter of a CONV network by backpropagation.

    Args:
        arch (BlockArchitecture): CONV-only network, updated in place.
        train (ImageDataset): Training images.
        config (SupervisedConfig): Epochs, batch size and schedule.
        seed (int): Seed of the minibatch order.
        test (ImageDataset): Optional set evaluated after every epoch.
        n_jobs (int): Threads; the result does not depend on it.

    Returns:
        Tuple[BlockArchitecture, List[EpochLog]]: The trained network and
            one log row per epoch.

    Raises:
        ConfigurationError: If the network has NNL blocks or class counts disagree.
            It is also raised when the schedule is too short.
        TrainingError: If the loss or a gradient stops being finite.
    """

    _validate_end_to_end(arch)
    validate_schedule_length(config)
    _validate_classes(arch, train)
    images = to_float(train)
    labels = train.labels
    test_images = to_float(test) if test is not None else None

    params = network_params(arch)
    state = AdamState()
    history: List[EpochLog] = []
    log.info('end-to-end training started', images=len(train), epochs=config.epochs,
             parameters=int(sum(param.size for param in params.values())))

    for epoch in range(1, config.epochs + 1):
        lr = lr_schedule(config.schedule, epoch)
        order = epoch_permutation(len(train), seed, epoch)
        loss_sum, errors = 0.0, 0

        for start in range(0, len(train), config.minibatch_size):
            rows = order[start:start + config.minibatch_size]
            loss, grads, probs = network_loss_and_grads(arch, images[rows], labels[rows], n_jobs)
            if not np.isfinite(loss):
                BaseValidation.abort_with_error(
                    TrainingError, f'loss became {loss} in epoch {epoch}, batch at {start}.',
                    'loss')

            loss_sum += loss * rows.size
            errors += int(np.count_nonzero(np.argmax(probs, axis=1) != labels[rows]))
            adam_step(params, grads, state, lr)

        test_error = None
        if test is not None:
            test_error = _top1_error(predict_logits(arch, test_images, n_jobs=n_jobs),
                                     test.labels)

        _finish_epoch(history, epoch, lr, loss_sum, errors, len(train), test_error, 'end-to-end')

    return arch, history


def supervised_config(section: ClassifierSection) -> SupervisedConfig:
    """
    Training settings described by a [classifier] config section.
    """

    schedule = LrSchedule(kind=ScheduleKind(section.schedule), base_lr=section.base_lr,
                          epochs=section.epochs)
    config = SupervisedConfig(epochs=section.epochs, minibatch_size=section.minibatch_size,
                              schedule=schedule, weight_scale=section.weight_scale)
    validate_schedule_length(config)
    return config
