"""Plaintext energy-concentration statistic c_h and its worst case c_max."""
import numpy as np
import numpy.typing as npt

from sparse_ots.core.errors import ArgumentError
from sparse_ots.transforms.bases import Basis


def c_statistic(x: npt.ArrayLike) -> float:
    """c = N * sum((x_j / ||x||)^4); 1 for flat energy, N for a single spike."""
    values = np.asarray(x, dtype=np.float64)
    energy = float(values @ values)
    if values.ndim != 1 or energy == 0.0:
        raise ArgumentError("c statistic needs a nonzero vector")
    theta_sq = values * values / energy
    return float(values.size * np.sum(theta_sq * theta_sq))


def sample_sparse(
    rng: np.random.Generator, count: int, n: int, sparsity: int
) -> npt.NDArray[np.float64]:
    """``count`` coefficient vectors with ``sparsity`` Gaussian entries at uniform positions."""
    if not 0 <= sparsity <= n:
        raise ArgumentError(f"Sparsity {sparsity} outside [0, {n}]")
    alpha = np.zeros((count, n))
    if sparsity == 0:
        return alpha
    keys = rng.random((count, n))
    positions = np.argpartition(keys, sparsity - 1, axis=1)[:, :sparsity]
    rows = np.arange(count)[:, None]
    alpha[rows, positions] = rng.standard_normal((count, sparsity))
    return alpha


def estimate_c_max(
    basis: Basis, sparsity: int, trials: int, seed: int, batch: int = 1000
) -> float:
    """Largest c over ``trials`` plaintexts Psi^T alpha with K-sparse Gaussian alpha.

    Uses a PRNG seeded independently of any keystream.
    """
    if trials < 1:
        raise ArgumentError("estimate_c_max needs at least one trial")
    if sparsity < 1:
        raise ArgumentError("estimate_c_max needs sparsity >= 1")
    rng = np.random.default_rng(seed)
    n = basis.dimension
    best = 0.0
    done = 0
    while done < trials:
        size = min(batch, trials - done)
        x = basis.synthesize(sample_sparse(rng, size, n, sparsity))
        energy = np.sum(x * x, axis=1, keepdims=True)
        theta_sq = x * x / energy
        best = max(best, float(np.max(n * np.sum(theta_sq * theta_sq, axis=1))))
        done += size
    return best
