"""Chosen-plaintext probes and the extraction they allow.

Class 1 sends the constant plaintext a = sqrt(Mr): every measurement becomes the plain sum
of one row's signs, exposing its sign counts but nothing about the permutation.

Class 2 sends x_j = 3^(j-1). Each unscaled measurement is then a balanced-ternary number whose
nonzero digits sit at the row's permuted positions with the row's signs. Base 2, with
entries in {-1, 0, +1}, is not uniquely decodable (-2^0 + 2^1 = +2^0), so base 3 is used.
The class-2 path is exact integer arithmetic end to end; 3^(N-1) is far outside float range.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from sparse_ots.codec.cipher import Ciphertext
from sparse_ots.core.errors import ArgumentError, InconsistentCiphertextError
from sparse_ots.core.models import SystemParams
from sparse_ots.keystream.lfsr import KeystreamSource
from sparse_ots.sensing.operator import SensingKey, build_sensing_key

# Rounding slack when reading integer sums out of a float ciphertext.
_INTEGER_TOL = 1e-6


@dataclass(frozen=True, slots=True)
class RowCount:
    """Sign counts of one sensing row (1-based ``row``)."""

    row: int
    plus: int
    minus: int

    def __post_init__(self) -> None:
        if self.plus < 0 or self.minus < 0:
            raise ArgumentError(f"Negative sign count in row {self.row}")

    @property
    def q(self) -> int:
        return self.plus + self.minus


@dataclass(frozen=True)
class ExtractedMatrix:
    """Signed support of every sensing row in permuted coordinates.

    ``rows[i]`` lists (1-based position, sign) pairs of row i+1, sorted by position.
    """

    n: int
    rows: list[list[tuple[int, int]]]

    def signed_matrix(self) -> npt.NDArray[np.int8]:
        out = np.zeros((len(self.rows), self.n), dtype=np.int8)
        for i, entries in enumerate(self.rows):
            for position, sign in entries:
                out[i, position - 1] = sign
        return out

    def support_matrix(self) -> npt.NDArray[np.int8]:
        return np.abs(self.signed_matrix())


@dataclass(frozen=True)
class ExactCiphertext:
    """Class-2 ciphertext kept as integers: y_i = numerators[i] / sqrt(mr)."""

    numerators: list[int]
    mr: int

    def unscaled(self) -> list[int]:
        """sqrt(Mr) * y, i.e. the integer row sums."""
        return list(self.numerators)


def true_signed_matrix(key: SensingKey, params: SystemParams) -> npt.NDArray[np.int8]:
    """Dense M x N sign pattern of Phi (without the 1/sqrt(Mr) scale), for ground truth."""
    out = np.zeros((params.m, params.n), dtype=np.int8)
    rows = np.arange(params.m)[:, None]
    out[rows, key.row_positions(params)] = key.signs
    return out


# ============================================================================
# Class 1
# ============================================================================


def class1_plaintext(params: SystemParams) -> npt.NDArray[np.float64]:
    return np.full(params.n, math.sqrt(params.mr))


def class1_attack(
    ciphertext: Ciphertext | npt.ArrayLike, params: SystemParams, rows: int | None = None
) -> list[RowCount]:
    """Sign counts q+ = (q + y_i)/2 of the first ``rows`` rows (default tau).

    Raises:
        InconsistentCiphertextError: If a measurement is not a feasible integer row sum
    """
    values = ciphertext.values if isinstance(ciphertext, Ciphertext) else np.asarray(ciphertext)
    count = params.tau if rows is None else rows
    if not 1 <= count <= params.m or len(values) < count:
        raise ArgumentError(f"Cannot read {count} rows from {len(values)} measurements")
    out = []
    for i in range(count):
        nearest = round(float(values[i]))
        if abs(values[i] - nearest) > _INTEGER_TOL:
            raise InconsistentCiphertextError(
                f"Row {i + 1} measurement {values[i]!r} is not an integer sign sum"
            )
        if abs(nearest) > params.q or (params.q + nearest) % 2:
            raise InconsistentCiphertextError(
                f"Row {i + 1} sum {nearest} impossible for q={params.q}"
            )
        plus = (params.q + nearest) // 2
        out.append(RowCount(row=i + 1, plus=plus, minus=params.q - plus))
    return out


# ============================================================================
# Class 2
# ============================================================================


def class2_plaintext(n: int) -> list[int]:
    return [3**j for j in range(n)]


def exact_encrypt(
    source: KeystreamSource, params: SystemParams, x: Sequence[int]
) -> tuple[ExactCiphertext, SensingKey]:
    """Noiseless encryption of an integer plaintext with integer arithmetic."""
    if len(x) != params.n:
        raise ArgumentError(f"Plaintext has {len(x)} entries, expected {params.n}")
    key = build_sensing_key(source, params)
    positions = key.row_positions(params)
    numerators = [
        sum(int(s) * x[int(p)] for s, p in zip(key.signs[i], positions[i], strict=True))
        for i in range(params.m)
    ]
    return ExactCiphertext(numerators=numerators, mr=params.mr), key


def balanced_ternary(value: int) -> list[tuple[int, int]]:
    """Nonzero digits of ``value`` as (1-based position, digit) pairs."""
    digits = []
    position = 1
    while value:
        remainder = value % 3
        if remainder == 2:
            digits.append((position, -1))
            value = (value + 1) // 3
        elif remainder == 1:
            digits.append((position, 1))
            value = (value - 1) // 3
        else:
            value //= 3
        position += 1
    return digits


def class2_attack(ciphertext: ExactCiphertext, params: SystemParams) -> ExtractedMatrix:
    """Recover every row's signed support from the class-2 probe ciphertext.

    Raises:
        InconsistentCiphertextError: If a row does not decode to exactly q digits within N
    """
    if len(ciphertext.numerators) != params.m:
        raise ArgumentError(
            f"Ciphertext has {len(ciphertext.numerators)} rows, expected {params.m}"
        )
    rows = []
    for i, value in enumerate(ciphertext.unscaled()):
        digits = balanced_ternary(value)
        if len(digits) != params.q or (digits and digits[-1][0] > params.n):
            raise InconsistentCiphertextError(
                f"Row {i + 1} decodes to {len(digits)} digits; expected {params.q} within N"
            )
        rows.append(digits)
    return ExtractedMatrix(n=params.n, rows=rows)
