"""Sparse sensing operator Phi = S P / sqrt(Mr), built from keystream and applied functionally."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from sparse_ots.core.errors import ArgumentError
from sparse_ots.core.models import SystemParams
from sparse_ots.keystream.lfsr import KeystreamSource
from sparse_ots.sensing.permutation import generate_permutation

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True)
class SensingKey:
    """Secret of one encryption.

    Attributes:
        signs: M x q array of +/-1; row i holds s_{i,j} for j in Lambda_i
        permutation: 0-based array, permutation[j] = pi(j+1) - 1
        c_s: Keystream symbols spent on signs
        c_p: Keystream symbols spent on the permutation
    """

    signs: npt.NDArray[np.int8]
    permutation: npt.NDArray[np.int64]
    c_s: int = 0
    c_p: int = 0

    def row_positions(self, params: SystemParams) -> npt.NDArray[np.int64]:
        """M x q array of 0-based plaintext positions touched by each row."""
        return self.permutation[_block_columns(params)]


def index_set(i: int, params: SystemParams) -> npt.NDArray[np.int64]:
    """Lambda_i for 1-based row ``i``, as 1-based column indices."""
    if not 1 <= i <= params.m:
        raise ArgumentError(f"Row index {i} outside [1, {params.m}]")
    start = ((i - 1) % params.eta) * params.q
    return np.arange(start + 1, start + params.q + 1, dtype=np.int64)


def _block_columns(params: SystemParams) -> npt.NDArray[np.int64]:
    """M x q array of 0-based Lambda_i columns."""
    offsets = (np.arange(params.m) % params.eta) * params.q
    return offsets[:, None] + np.arange(params.q)[None, :]


def build_sensing_key(source: KeystreamSource, params: SystemParams) -> SensingKey:
    """Draw signs and permutation from consecutive keystream symbols.

    Row i consumes symbols (i-1)q+1 .. iq, which equals the keystream index
    floor((i-1)/eta)*N + j over j in Lambda_i.
    """
    c_s = params.q * params.m
    signs = source.take_bits(c_s).reshape(params.m, params.q)
    permutation, c_p = generate_permutation(source.iter_bits(), params.n)
    logger.debug("Sensing key drew c_s=%d, c_p=%d symbols", c_s, c_p)
    return SensingKey(signs=signs, permutation=permutation, c_s=c_s, c_p=c_p)


def _check_length(vector: FloatArray, expected: int, name: str) -> None:
    if vector.ndim != 1 or vector.shape[0] != expected:
        raise ArgumentError(f"{name} must have length {expected}, got shape {vector.shape}")


def apply_phi(key: SensingKey, params: SystemParams, x: npt.ArrayLike) -> FloatArray:
    """y = S P x / sqrt(Mr) without forming Phi."""
    vector = np.asarray(x, dtype=np.float64)
    _check_length(vector, params.n, "Plaintext")
    permuted = vector[key.permutation].reshape(params.eta, params.q)
    rows = permuted[np.arange(params.m) % params.eta]
    return np.einsum("ij,ij->i", key.signs, rows) / math.sqrt(params.mr)


def apply_phi_adjoint(key: SensingKey, params: SystemParams, y: npt.ArrayLike) -> FloatArray:
    """Phi^T y."""
    values = np.asarray(y, dtype=np.float64)
    _check_length(values, params.m, "Measurement")
    blocks = np.zeros((params.eta, params.q))
    np.add.at(blocks, np.arange(params.m) % params.eta, key.signs * values[:, None])
    out = np.empty(params.n)
    out[key.permutation] = blocks.ravel()
    return out / math.sqrt(params.mr)


def dump_key(key: SensingKey, params: SystemParams) -> str:
    """Debug text form: ``i: j:+1 j:-1 ...`` per row, then ``perm: ...`` (1-based)."""
    lines = []
    for i in range(1, params.m + 1):
        cols = index_set(i, params)
        entries = " ".join(
            f"{j}:{'+1' if s > 0 else '-1'}" for j, s in zip(cols, key.signs[i - 1], strict=True)
        )
        lines.append(f"{i}: {entries}")
    lines.append("perm: " + ",".join(str(int(p) + 1) for p in key.permutation))
    return "\n".join(lines) + "\n"
