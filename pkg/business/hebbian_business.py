"""
Business module for the local Hebbian learning rule.

For a minibatch of patches v^A the currents are I_mu^A = sum_j M_mu,j v_j^A.
Per sample, the strongest driven row gets g = 1, the row of rank m gets
g = -Delta and all other rows g = 0. The update is

    dM_mu,i = eps * sum_A g[rank(I_mu^A)] * (v_i^A - I_mu^A * M_mu,i)

optionally divided by its largest absolute entry before eps is applied.
"""

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
import structlog

from business.dataset_business import to_float
from business.patch_business import epoch_stream, make_patch_source, normalize_batch
from core.numeric import gemm
from entities.dataset import ImageDataset
from entities.filter_bank import ConvergenceReport, FilterBank, HebbianConfig
from entities.patches import PatchBatch, PatchSource
from entities.run_config import BlockConfig, FiltersSection
from settings import THREADS
from validations.base import BaseValidation
from validations.hebbian_validation import HebbianValidation

log = structlog.get_logger()

CONVERGENCE_TOLERANCE = 1e-2
DEAD_UNIT_THRESHOLD = 1e-5


@dataclass(frozen=True)
class RankAssignment:
    """
    Per-sample ranking of the filters.

    Attributes:
        winners (np.ndarray): Row with the largest current for each sample.
        rank_m_rows (Optional[np.ndarray]): Row of rank m for each sample;
            None when m exceeds the number of rows.
        currents (np.ndarray): (K, B) currents.
    """

    winners: np.ndarray
    rank_m_rows: Optional[np.ndarray]
    currents: np.ndarray


def _as_patches(batch: Union[PatchBatch, np.ndarray]) -> np.ndarray:
    return batch.patches if isinstance(batch, PatchBatch) else np.asarray(batch)


def rank_activations(weights: np.ndarray, batch: Union[PatchBatch, np.ndarray],
                     rank_m: int = 2, n_jobs: int = THREADS) -> RankAssignment:
    """
    Rank the rows of M by their current for every sample.

    Ties are broken by the lowest row index.

    Args:
        weights (np.ndarray): (K, N) filter matrix.
        batch (PatchBatch | np.ndarray): (B, N) patches.
        rank_m (int): Rank receiving the anti-Hebbian update.
        n_jobs (int): Threads for the current computation.

    Returns:
        RankAssignment: Winners, rank-m rows and currents.

    Raises:
        ConfigurationError: If patch and filter lengths differ.
    """

    patches = _as_patches(batch)
    HebbianValidation.validate_batch_shape(weights, patches)

    currents = gemm(weights, patches, trans_b=True, n_jobs=n_jobs)
    order = np.argsort(-currents, axis=0, kind='stable')

    rank_m_rows = order[rank_m - 1] if rank_m <= weights.shape[0] else None
    return RankAssignment(winners=order[0], rank_m_rows=rank_m_rows, currents=currents)


def g_of_rank(rank: int, rank_m: int, anti_hebbian: float) -> float:
    """
    Activation g of a row given its 1-based rank.

    Returns:
        float: 1 for rank 1, -Delta for rank m, 0 otherwise.
    """

    if rank == 1:
        return 1.0
    if rank == rank_m:
        return -anti_hebbian
    return 0.0


def _hebbian_step(weights: np.ndarray, patches: np.ndarray, learning_rate: float,
                  rank_m: int, anti_hebbian: float, scale_update_by_max: bool,
                  precision: float, n_jobs: int):
    ranking = rank_activations(weights, patches, rank_m, n_jobs)
    samples = np.arange(patches.shape[0])

    activation = np.zeros_like(ranking.currents)
    activation[ranking.winners, samples] = 1
    if ranking.rank_m_rows is not None and anti_hebbian:
        activation[ranking.rank_m_rows, samples] = -anti_hebbian

    # One product per call; for a fixed shape the result is deterministic.
    hebbian = gemm(activation, patches, n_jobs=n_jobs)
    decay = np.sum(activation * ranking.currents, axis=1)
    delta = hebbian - decay[:, None] * weights

    if scale_update_by_max:
        delta = delta / max(float(np.max(np.abs(delta))), precision)

    return (learning_rate * delta).astype(weights.dtype, copy=False), ranking.winners


def hebbian_update(weights: np.ndarray, batch: Union[PatchBatch, np.ndarray],
                   learning_rate: float, rank_m: int, anti_hebbian: float,
                   scale_update_by_max: bool = False, precision: float = 1e-30,
                   n_jobs: int = THREADS) -> np.ndarray:
    """
    Weight change produced by one minibatch.

    Args:
        weights (np.ndarray): (K, N) filter matrix.
        batch (PatchBatch | np.ndarray): (B, N) patches.
        learning_rate (float): eps.
        rank_m (int): Rank receiving -Delta.
        anti_hebbian (float): Delta.
        scale_update_by_max (bool): Divide the summed update by its largest
            absolute entry (floored at `precision`) before applying eps.
        precision (float): Floor of the divisor.
        n_jobs (int): Threads.

    Returns:
        np.ndarray: (K, N) update; only winner and rank-m rows are nonzero.

    Raises:
        ConfigurationError: If patch and filter lengths differ.
    """

    delta, _ = _hebbian_step(weights, _as_patches(batch), learning_rate, rank_m,
                             anti_hebbian, scale_update_by_max, precision, n_jobs)
    return delta


def initial_weights(channels: int, n_inputs: int, seed: int) -> np.ndarray:
    """
    Standard-normal float32 matrix drawn from a PCG64 generator.
    """

    generator = np.random.Generator(np.random.PCG64(seed))
    return generator.standard_normal((channels, n_inputs), dtype=np.float32)


def convergence_report(bank: FilterBank,
                       tolerance: float = CONVERGENCE_TOLERANCE) -> ConvergenceReport:
    """
    How many winning rows have reached unit norm.

    Args:
        bank (FilterBank): A trained bank.
        tolerance (float): Allowed |norm - 1|.

    Returns:
        ConvergenceReport: Counts over rows with at least one final-epoch win.
    """

    winning = bank.win_counts > 0
    deviation = np.abs(bank.row_norms()[winning] - 1)
    converged = int(np.count_nonzero(deviation < tolerance))
    winners = int(np.count_nonzero(winning))

    return ConvergenceReport(
        winning_rows=winners,
        converged_rows=converged,
        converged_fraction=converged / winners if winners else 0.0,
        max_deviation=float(deviation.max()) if winners else 0.0,
        tolerance=tolerance)


def train_filters(source: PatchSource, config: HebbianConfig, seed: int,
                  n_jobs: int = THREADS,
                  on_epoch: Callable[[int, FilterBank], None] = None) -> FilterBank:
    """
    Learn a filter bank with the local rule.

    The rate decreases linearly, eps(e) = eps0 * (1 - e / epochs) for the
    0-based epoch e, and the weights are updated after every minibatch.
    Win counts are those of the final epoch.

    Args:
        source (PatchSource): Patches to learn from.
        config (HebbianConfig): Hyperparameters.
        seed (int): Seed of the initialization and of the patch shuffling.
        n_jobs (int): Threads; the result does not depend on it.
        on_epoch (Callable): Called with (epoch, bank) after each epoch.

    Returns:
        FilterBank: The trained bank.

    Raises:
        ConfigurationError: If the configuration or the patch length is invalid.
    """

    HebbianValidation.validate_config(config)
    BaseValidation.validate_inner_dimensions(config.n_inputs, source.n_inputs, 'window')

    weights = initial_weights(config.channels, config.n_inputs, seed)
    win_counts = np.zeros(config.channels, dtype=np.uint64)
    bank = FilterBank(weights=weights, window=config.window, win_counts=win_counts,
                      epochs_trained=0, seed=seed)

    log.info('filter training started', channels=config.channels, window=config.window,
             patches=source.count, epochs=config.epochs, seed=seed)

    for epoch in range(config.epochs):
        learning_rate = config.learning_rate * (1 - epoch / config.epochs)
        epoch_wins = np.zeros(config.channels, dtype=np.uint64)

        for batch in epoch_stream(source, config.minibatch_size, seed, epoch):
            if config.normalize_patches:
                batch = normalize_batch(batch)

            delta, winners = _hebbian_step(
                weights, batch.patches, learning_rate, config.rank_m, config.anti_hebbian,
                config.scale_update_by_max, config.precision, n_jobs)
            weights += delta
            epoch_wins += np.bincount(winners, minlength=config.channels).astype(np.uint64)

        BaseValidation.validate_finite(weights, 'weights')
        bank.win_counts = epoch_wins
        bank.epochs_trained = epoch + 1

        report = convergence_report(bank)
        log.info('filter epoch finished', epoch=epoch + 1, lr=learning_rate,
                 winning_rows=report.winning_rows,
                 converged_fraction=round(report.converged_fraction, 4),
                 max_deviation=report.max_deviation)

        if on_epoch is not None:
            on_epoch(epoch + 1, bank)

    return bank


def detect_dead_units(bank: FilterBank,
                      threshold: float = DEAD_UNIT_THRESHOLD) -> List[int]:
    """
    Rows that (almost) never won during the final epoch.

    Args:
        bank (FilterBank): A trained bank.
        threshold (float): Minimum share of wins for a live row.

    Returns:
        List[int]: Indices of rows whose win fraction is below threshold.
    """

    total = int(bank.win_counts.sum())
    if total == 0:
        return list(range(bank.channels))

    fractions = bank.win_counts.astype(np.float64) / total
    return [int(row) for row in np.flatnonzero(fractions < threshold)]


def prune_dead_units(bank: FilterBank, dead_rows: Sequence[int]) -> FilterBank:
    """
    A copy of the bank without the given rows.
    """

    keep = np.setdiff1d(np.arange(bank.channels), np.asarray(dead_rows, dtype=np.int64))
    log.info('dead units pruned', removed=bank.channels - keep.size, kept=keep.size)

    return FilterBank(weights=bank.weights[keep].copy(), window=bank.window,
                      win_counts=bank.win_counts[keep].copy(),
                      epochs_trained=bank.epochs_trained, seed=bank.seed)


def hebbian_config_for_block(block: BlockConfig, filters: FiltersSection) -> HebbianConfig:
    """
    Hyperparameters of the Hebbian run that learns one block's filters.
    """

    return HebbianConfig(
        channels=block.channels, window=block.window, stride=block.stride,
        learning_rate=filters.learning_rate, epochs=filters.epochs, rank_m=block.rank_m,
        anti_hebbian=block.delta, minibatch_size=filters.minibatch_size,
        scale_update_by_max=filters.scale_update_by_max,
        normalize_patches=filters.normalize_patches)


def train_block_filters(dataset: ImageDataset, blocks: Sequence[BlockConfig],
                        filters: FiltersSection, seed: int,
                        n_jobs: int = THREADS) -> List[FilterBank]:
    """
    Learn one bank per NNL block of an architecture.

    Block i (counting NNL blocks only) is trained with seed + i. Dead rows
    are removed when `filters.prune_dead` is set.

    Args:
        dataset (ImageDataset): Training images.
        blocks (Sequence[BlockConfig]): Architecture; CONV blocks are skipped.
        filters (FiltersSection): Settings shared by every run.
        seed (int): Seed of the first bank.
        n_jobs (int): Threads.

    Returns:
        List[FilterBank]: Banks in block order.
    """

    images = to_float(dataset)
    banks = []

    for index, block in enumerate(b for b in blocks if b.type == 'nnl'):
        config = hebbian_config_for_block(block, filters)
        source = make_patch_source(images, block.window, block.stride)
        bank = train_filters(source, config, seed + index, n_jobs=n_jobs)

        if filters.prune_dead:
            dead = detect_dead_units(bank, filters.dead_unit_threshold)
            if dead:
                bank = prune_dead_units(bank, dead)
        banks.append(bank)

    return banks
