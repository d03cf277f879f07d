"""Uniform random permutations from a coin-tossing bit stream."""
from collections.abc import Iterator

import numpy as np
import numpy.typing as npt


class _CountingBits:
    """Wraps a bit iterator and counts what was drawn."""

    def __init__(self, bits: Iterator[int]):
        self._bits = bits
        self.consumed = 0

    def uniform(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection on ceil(log2 bound) bits."""
        width = (bound - 1).bit_length()
        while True:
            value = 0
            for _ in range(width):
                value = (value << 1) | next(self._bits)
            self.consumed += width
            if value < bound:
                return value


def generate_permutation(bits: Iterator[int], n: int) -> tuple[npt.NDArray[np.int64], int]:
    """Fisher-Yates shuffle driven by ``bits``.

    Args:
        bits: Iterator of unbiased 0/1 values
        n: Permutation size

    Returns:
        Tuple of (0-based permutation array, number of bits consumed)
    """
    perm = np.arange(n, dtype=np.int64)
    source = _CountingBits(bits)
    for i in range(n - 1, 0, -1):
        j = source.uniform(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return perm, source.consumed
