"""
Validation module for run configurations.
"""

from typing import Sequence

from entities.run_config import BlockConfig
from validations.base import BaseValidation

SWEEP_RANGES = {
    'channels': (100, 2000),
    'window': (2, 18),
    'delta': (0.0, 0.3),
    'power': (1, 100),
    'stride': (1, 4),
    'pool_stride': (1, 4),
    'pool_window': (1, 18),
}


class ConfigValidation:
    """
    Validation class for parsed run configurations.
    """

    @staticmethod
    def warn_sweep_ranges(blocks: Sequence[BlockConfig]) -> int:
        """
        Log a warning for every block value outside the explored hyperparameter ranges.

        Args:
            blocks (Sequence[BlockConfig]): Parsed blocks.

        Returns:
            int: Number of warnings emitted.
        """
        warnings = 0
        for index, block in enumerate(blocks):
            for key, (low, high) in SWEEP_RANGES.items():
                if key == 'power' and block.type != 'nnl':
                    continue
                if BaseValidation.warn_outside_range(
                        getattr(block, key), low, high, f'architecture.{key}[{index}]'):
                    warnings += 1
        return warnings
