"""Orthonormal sparsifying bases.

All transforms act along the last axis, so a batch of plaintexts can be passed as an array
of shape (..., N). The 2D arrangement applies the 1D transform of side n to both axes of
the column-stacked n x n image, which is the Kronecker product Psi_n (x) Psi_n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy import fft

from sparse_ots.core.errors import ArgumentError
from sparse_ots.core.models import Arrangement, BasisKind

FloatArray = npt.NDArray[np.float64]

_SQRT3 = math.sqrt(3.0)
HAAR_LOWPASS = np.array([1.0, 1.0]) / math.sqrt(2.0)
D4_LOWPASS = np.array([1 + _SQRT3, 3 + _SQRT3, 3 - _SQRT3, 1 - _SQRT3]) / (4 * math.sqrt(2.0))


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def _highpass(lowpass: FloatArray) -> FloatArray:
    length = len(lowpass)
    return np.array([(-1) ** m * lowpass[length - 1 - m] for m in range(length)])


# ============================================================================
# 1D kernels (last axis)
# ============================================================================


def _fwht(x: FloatArray) -> FloatArray:
    """Orthonormal Walsh-Hadamard transform in natural (Sylvester) order; self-inverse."""
    n = x.shape[-1]
    lead = x.shape[:-1]
    y = x.astype(np.float64, copy=True)
    h = 1
    while h < n:
        y = y.reshape(*lead, n // (2 * h), 2, h)
        a = y[..., 0, :]
        b = y[..., 1, :]
        y = np.stack((a + b, a - b), axis=-2).reshape(*lead, n)
        h *= 2
    return y / math.sqrt(n)


def _dwt(x: FloatArray, lowpass: FloatArray, min_block: int) -> FloatArray:
    """Periodic multilevel analysis; layout [a_J, d_J, ..., d_1]."""
    highpass = _highpass(lowpass)
    out = x.astype(np.float64, copy=True)
    length = x.shape[-1]
    while length >= min_block:
        current = out[..., :length]
        approx = np.zeros(current.shape[:-1] + (length // 2,))
        detail = np.zeros_like(approx)
        for m in range(len(lowpass)):
            shifted = np.roll(current, -m, axis=-1)[..., ::2]
            approx += lowpass[m] * shifted
            detail += highpass[m] * shifted
        out[..., : length // 2] = approx
        out[..., length // 2 : length] = detail
        length //= 2
    return out


def _idwt(coeffs: FloatArray, lowpass: FloatArray, min_block: int) -> FloatArray:
    highpass = _highpass(lowpass)
    out = coeffs.astype(np.float64, copy=True)
    n = coeffs.shape[-1]
    length = n
    levels = []
    while length >= min_block:
        levels.append(length)
        length //= 2
    for length in reversed(levels):
        half = length // 2
        up_a = np.zeros(out.shape[:-1] + (length,))
        up_d = np.zeros_like(up_a)
        up_a[..., ::2] = out[..., :half]
        up_d[..., ::2] = out[..., half:length]
        rebuilt = np.zeros_like(up_a)
        for m in range(len(lowpass)):
            rebuilt += lowpass[m] * np.roll(up_a, m, axis=-1)
            rebuilt += highpass[m] * np.roll(up_d, m, axis=-1)
        out[..., :length] = rebuilt
    return out


def _forward_1d(kind: BasisKind, x: FloatArray) -> FloatArray:
    match kind:
        case BasisKind.IDENTITY:
            return x.astype(np.float64, copy=True)
        case BasisKind.DCT:
            return np.asarray(fft.dct(x, type=2, norm="ortho", axis=-1), dtype=np.float64)
        case BasisKind.WHT:
            return _fwht(x)
        case BasisKind.HAAR:
            return _dwt(x, HAAR_LOWPASS, 2)
        case BasisKind.D4:
            return _dwt(x, D4_LOWPASS, 4)


def _inverse_1d(kind: BasisKind, alpha: FloatArray) -> FloatArray:
    match kind:
        case BasisKind.IDENTITY:
            return alpha.astype(np.float64, copy=True)
        case BasisKind.DCT:
            return np.asarray(fft.idct(alpha, type=2, norm="ortho", axis=-1), dtype=np.float64)
        case BasisKind.WHT:
            return _fwht(alpha)
        case BasisKind.HAAR:
            return _idwt(alpha, HAAR_LOWPASS, 2)
        case BasisKind.D4:
            return _idwt(alpha, D4_LOWPASS, 4)


# ============================================================================
# Basis
# ============================================================================


@dataclass(frozen=True)
class Basis:
    """An orthonormal basis Psi of dimension ``dimension``.

    For the 2D arrangement, ``dimension`` must be a perfect square n*n and the 1D kind
    constraints apply to the side n.
    """

    kind: BasisKind
    dimension: int
    arrangement: Arrangement = Arrangement.ONE_D

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ArgumentError(f"Basis dimension must be positive, got {self.dimension}")
        if self.arrangement is Arrangement.KRONECKER_2D:
            side = math.isqrt(self.dimension)
            if side * side != self.dimension:
                raise ArgumentError(f"2D basis needs a square dimension, got {self.dimension}")
        self._check_side(self.side)

    @property
    def side(self) -> int:
        """Length of the 1D transform actually applied."""
        if self.arrangement is Arrangement.KRONECKER_2D:
            return math.isqrt(self.dimension)
        return self.dimension

    def _check_side(self, n: int) -> None:
        if self.kind in (BasisKind.WHT, BasisKind.HAAR, BasisKind.D4) and not _is_power_of_two(n):
            raise ArgumentError(f"{self.kind.value} needs a power-of-two length, got {n}")
        if self.kind is BasisKind.HAAR and n < 2:
            raise ArgumentError("Haar needs length >= 2")
        if self.kind is BasisKind.D4 and n < 4:
            raise ArgumentError("D4 needs length >= 4")

    def _checked(self, values: npt.ArrayLike) -> FloatArray:
        array = np.asarray(values, dtype=np.float64)
        if array.ndim == 0 or array.shape[-1] != self.dimension:
            raise ArgumentError(
                f"Expected last axis of length {self.dimension}, got shape {array.shape}"
            )
        return array

    def analyze(self, x: npt.ArrayLike) -> FloatArray:
        """alpha = Psi x."""
        signal = self._checked(x)
        if self.arrangement is Arrangement.ONE_D:
            return _forward_1d(self.kind, signal)
        return self._separable(signal, forward=True)

    def synthesize(self, alpha: npt.ArrayLike) -> FloatArray:
        """x = Psi^T alpha."""
        coeffs = self._checked(alpha)
        if self.arrangement is Arrangement.ONE_D:
            return _inverse_1d(self.kind, coeffs)
        return self._separable(coeffs, forward=False)

    def _separable(self, values: FloatArray, *, forward: bool) -> FloatArray:
        n = self.side
        step = _forward_1d if forward else _inverse_1d
        # Row-major reshape of a column-stacked vector puts image columns on the last axis.
        grid = values.reshape(*values.shape[:-1], n, n)
        grid = step(self.kind, grid)
        grid = np.swapaxes(step(self.kind, np.swapaxes(grid, -1, -2)), -1, -2)
        return np.ascontiguousarray(grid).reshape(values.shape)

    def matrix(self) -> FloatArray:
        """Dense Psi; only sensible for small dimensions."""
        return self.analyze(np.eye(self.dimension)).T


def analyze(basis: Basis, x: npt.ArrayLike) -> FloatArray:
    return basis.analyze(x)


def synthesize(basis: Basis, alpha: npt.ArrayLike) -> FloatArray:
    return basis.synthesize(alpha)


def coherence(basis: Basis, batch: int = 256) -> float:
    """mu = sqrt(N) * max |psi_ij|, scanning basis columns a batch at a time."""
    n = basis.dimension
    largest = 0.0
    for start in range(0, n, batch):
        stop = min(start + batch, n)
        units = np.zeros((stop - start, n))
        units[np.arange(stop - start), np.arange(start, stop)] = 1.0
        largest = max(largest, float(np.max(np.abs(basis.synthesize(units)))))
    return math.sqrt(n) * largest
