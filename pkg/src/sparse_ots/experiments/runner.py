"""Work-item scheduling with per-item seeds.

Each item draws its randomness from ``SeedSequence([base, grid, trial, stream])``, so
results do not depend on how items are spread over workers.
"""
from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")


def item_rng(base: int, grid: int, trial: int, stream: int = 0) -> np.random.Generator:
    """Generator for work item (grid point ``grid``, trial ``trial``).

    ``stream`` separates independent draws made for the same item.
    """
    return np.random.default_rng(np.random.SeedSequence([base, grid, trial, stream]))


def run_items(func: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """Map ``func`` over ``items`` in order, on a thread pool when ``workers > 1``."""
    work: Sequence[T] = list(items)
    if workers <= 1 or len(work) <= 1:
        return [func(item) for item in work]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, work))


def random_state(rng: np.random.Generator, degree: int) -> int:
    """Uniform nonzero ``degree``-bit LFSR state."""
    mask = (1 << degree) - 1
    while True:
        raw = rng.integers(0, 256, size=(degree + 7) // 8, dtype=np.uint8)
        state = int.from_bytes(raw.tobytes(), "big") & mask
        if state:
            return state
