"""Orthogonal matching pursuit on the composed operator A = Phi Psi^T."""
from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
from scipy.linalg import solve_triangular

from sparse_ots.core.errors import ArgumentError
from sparse_ots.transforms.bases import Basis

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
LinearMap = Callable[[FloatArray], FloatArray]

# Relative size below which a new column counts as dependent on the chosen ones.
_DEPENDENCE_TOL = 1e-10


@dataclass(frozen=True)
class RecoverySettings:
    """Decryption settings: iteration budget K, relative residual tolerance and basis."""

    sparsity: int
    basis: Basis
    tolerance: float = 1e-6

    def __post_init__(self) -> None:
        if self.sparsity < 1:
            raise ArgumentError(f"Sparsity budget must be >= 1, got {self.sparsity}")
        if self.tolerance < 0:
            raise ArgumentError(f"Tolerance must be >= 0, got {self.tolerance}")


@dataclass
class OmpResult:
    """Outcome of one pursuit run."""

    coefficients: FloatArray
    support: list[int] = field(default_factory=list)
    excluded: list[int] = field(default_factory=list)
    residual_norms: list[float] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.support) + len(self.excluded)


def orthogonal_matching_pursuit(
    forward: LinearMap,
    adjoint: LinearMap,
    y: FloatArray,
    n: int,
    sparsity: int,
    tolerance: float = 1e-6,
) -> OmpResult:
    """Greedy sparse solve of y = A alpha with A given as a forward/adjoint pair.

    The least-squares fit on the support is kept as a growing QR factorization
    (Gram-Schmidt with one reorthogonalization pass).
    """
    m = y.shape[0]
    result = OmpResult(coefficients=np.zeros(n))
    y_norm = float(np.linalg.norm(y))
    result.residual_norms.append(y_norm)
    if y_norm == 0.0:
        return result

    q_basis = np.zeros((m, 0))
    r_cols: list[FloatArray] = []
    projections: list[float] = []
    residual = y.copy()
    blocked = np.zeros(n, dtype=bool)

    for _ in range(sparsity):
        if np.linalg.norm(residual) <= tolerance * y_norm:
            break
        correlation = np.abs(adjoint(residual))
        correlation[blocked] = -1.0
        j = int(np.argmax(correlation))
        if correlation[j] <= 0.0:
            break
        blocked[j] = True

        unit = np.zeros(n)
        unit[j] = 1.0
        column = forward(unit)
        coords = q_basis.T @ column
        v = column - q_basis @ coords
        again = q_basis.T @ v
        v -= q_basis @ again
        coords += again
        v_norm = float(np.linalg.norm(v))
        if v_norm <= _DEPENDENCE_TOL * max(float(np.linalg.norm(column)), 1e-300):
            logger.debug("OMP excluded dependent column %d", j)
            result.excluded.append(j)
            continue

        q_new = v / v_norm
        q_basis = np.column_stack([q_basis, q_new])
        r_cols.append(np.append(coords, v_norm))
        projections.append(float(q_new @ y))
        result.support.append(j)
        residual = y - q_basis @ np.asarray(projections)
        result.residual_norms.append(float(np.linalg.norm(residual)))

    if result.support:
        size = len(result.support)
        r_matrix = np.zeros((size, size))
        for col, values in enumerate(r_cols):
            r_matrix[: len(values), col] = values
        solution = solve_triangular(r_matrix, np.asarray(projections), lower=False)
        result.coefficients[result.support] = solution
    return result


def recover(
    forward_phi: LinearMap, adjoint_phi: LinearMap, y: FloatArray, settings: RecoverySettings
) -> OmpResult:
    """OMP on A = Phi Psi^T for the basis in ``settings``."""
    basis = settings.basis
    if settings.sparsity > y.shape[0]:
        raise ArgumentError(f"Sparsity budget {settings.sparsity} exceeds M={y.shape[0]}")
    return orthogonal_matching_pursuit(
        lambda alpha: forward_phi(basis.synthesize(alpha)),
        lambda r: basis.analyze(adjoint_phi(r)),
        y,
        basis.dimension,
        settings.sparsity,
        settings.tolerance,
    )
