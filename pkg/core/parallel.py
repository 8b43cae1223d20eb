"""
Deterministic thread pool helpers.

Work is always split into chunks whose boundaries depend only on the
problem size, never on the number of threads, and results are returned
in chunk order. Any reduction performed by the caller over those results
therefore has a fixed order.
"""

from typing import Callable, List, Sequence, TypeVar

from joblib import Parallel, delayed

from settings import THREADS

T = TypeVar('T')
R = TypeVar('R')


def chunk_bounds(total: int, chunk_size: int) -> List[slice]:
    """
    Split range(total) into consecutive slices of at most chunk_size items.

    Args:
        total (int): Number of items.
        chunk_size (int): Maximum slice length.

    Returns:
        List[slice]: Slices covering range(total) in order.
    """
    return [slice(start, min(start + chunk_size, total))
            for start in range(0, total, chunk_size)]


def ordered_map(func: Callable[[T], R], items: Sequence[T], n_jobs: int = THREADS) -> List[R]:
    """
    Apply func to every item, possibly on several threads.

    Args:
        func (Callable): Pure function of one item.
        items (Sequence): Work items.
        n_jobs (int): Number of threads; 1 runs inline.

    Returns:
        List: Results in the order of `items`.
    """
    if n_jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    return Parallel(n_jobs=n_jobs, backend='threading')(
        delayed(func)(item) for item in items)
