"""
This module defines the run configuration read from config files.
"""

from dataclasses import dataclass, field
from typing import List, Optional


@dataclass(frozen=True)
class RunSection:
    """
    [run] section.

    Attributes:
        seed (int): Root seed of every random draw.
        threads (int): Worker threads; results do not depend on it.
        output_dir (str): Directory for produced files.
    """

    seed: int = 0
    threads: int = 1
    output_dir: str = 'runs'


@dataclass(frozen=True)
class DataSection:
    """
    [data] section.

    Attributes:
        train (List[str]): Training batch files.
        test (List[str]): Held-out batch files.
        format (str): 'cifar10' or 'raw'.
        val_fraction (float): Share of the training set held out for validation.
        use_validation (bool): Evaluate on the validation split instead of `test`.
        train_limit (Optional[int]): Keep only the first images of the training set.
        test_limit (Optional[int]): Keep only the first images of the test set.
    """

    train: List[str]
    test: List[str] = field(default_factory=list)
    format: str = 'cifar10'
    val_fraction: float = 0.1
    use_validation: bool = False
    train_limit: Optional[int] = None
    test_limit: Optional[int] = None


@dataclass(frozen=True)
class FiltersSection:
    """
    [filters] section: settings shared by the Hebbian runs of every block.
    """

    learning_rate: float = 1e-4
    epochs: int = 500
    minibatch_size: int = 1000
    scale_update_by_max: bool = True
    normalize_patches: bool = False
    dead_unit_threshold: float = 1e-5
    prune_dead: bool = False


@dataclass(frozen=True)
class BlockConfig:
    """
    One block of the architecture.

    Attributes:
        type (str): 'nnl' or 'conv'.
        channels (int): K.
        window (int): W.
        power (int): n (ignored by conv blocks).
        stride (int): ST.
        pool_window (int): W_p.
        pool_stride (int): ST_p.
        delta (float): Anti-Hebbian strength used when training the block's filters.
        rank_m (int): Rank receiving the anti-Hebbian update.
    """

    type: str
    channels: int
    window: int
    power: int
    stride: int
    pool_window: int
    pool_stride: int
    delta: float
    rank_m: int


@dataclass(frozen=True)
class ClassifierSection:
    """
    [classifier] section.
    """

    epochs: int = 70
    minibatch_size: int = 300
    schedule: str = 'cifar_70'
    base_lr: float = 1e-4
    weight_scale: float = 1.0


@dataclass(frozen=True)
class TransferSection:
    """
    [transfer] section.
    """

    runs: int = 5


@dataclass(frozen=True)
class RunConfig:
    """
    A fully validated experiment configuration.
    """

    data: DataSection
    blocks: List[BlockConfig]
    run: RunSection = RunSection()
    filters: FiltersSection = FiltersSection()
    classifier: ClassifierSection = ClassifierSection()
    transfer: TransferSection = TransferSection()
