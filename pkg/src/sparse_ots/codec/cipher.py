"""Encryption, decryption and reconstruction quality."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from sparse_ots.codec.omp import OmpResult, RecoverySettings, recover
from sparse_ots.core.errors import ArgumentError
from sparse_ots.core.models import SystemParams
from sparse_ots.keystream.lfsr import KeystreamSource
from sparse_ots.sensing.operator import (
    SensingKey,
    apply_phi,
    apply_phi_adjoint,
    build_sensing_key,
)

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True)
class Ciphertext:
    """M measurements with the public dimensions and noise level that produced them."""

    values: FloatArray
    n: int
    m: int
    q: int
    sigma: float = 0.0

    def __post_init__(self) -> None:
        if self.values.shape != (self.m,):
            raise ArgumentError(f"Ciphertext holds {self.values.shape} values, expected {self.m}")
        if not np.all(np.isfinite(self.values)):
            raise ArgumentError("Ciphertext contains non-finite values")

    def matches(self, params: SystemParams) -> bool:
        return (self.n, self.m, self.q) == (params.n, params.m, params.q)


def keystream_budget(params: SystemParams) -> float:
    """Expected symbols per encryption, qM + N log2 N."""
    return params.q * params.m + params.n * math.log2(params.n)


def max_encryptions(params: SystemParams, degree: int) -> int:
    """Encryptions before the 2^floor(k/2) period floor of the keystream is reached."""
    return int(2 ** (degree // 2) // keystream_budget(params))


def check_period(source: KeystreamSource) -> bool:
    """Whether the consumed keystream is still inside the guaranteed period.

    Logs one warning per source once the bound is crossed.
    """
    limit = 2 ** (source.spec.degree // 2)
    inside = source.keystream_count < limit
    if not inside and not source.period_warned:
        logger.warning(
            "Keystream use (%d symbols) reached the 2^%d period floor; refresh the key",
            source.keystream_count,
            source.spec.degree // 2,
        )
        source.period_warned = True
    return inside


def sigma_for_pnr(x: npt.ArrayLike, m: int, pnr: float) -> float:
    """Noise level giving PNR = ||x||^2 / (M sigma^2); 0 for infinite PNR."""
    if pnr <= 0:
        raise ArgumentError(f"PNR must be positive, got {pnr}")
    if math.isinf(pnr):
        return 0.0
    energy = float(np.sum(np.square(x)))
    return math.sqrt(energy / (m * pnr))


def pnr_of(x: npt.ArrayLike, m: int, sigma: float) -> float:
    if sigma == 0:
        return math.inf
    return float(np.sum(np.square(x))) / (m * sigma * sigma)


def encrypt(
    source: KeystreamSource,
    params: SystemParams,
    x: npt.ArrayLike,
    noise_seed: int | None = None,
) -> tuple[Ciphertext, SensingKey]:
    """y = Phi x + n with a fresh sensing key drawn from ``source``.

    The returned key is for the legitimate recipient and for tests only.
    """
    plaintext = np.asarray(x, dtype=np.float64)
    if plaintext.shape != (params.n,):
        raise ArgumentError(f"Plaintext has shape {plaintext.shape}, expected ({params.n},)")
    key = build_sensing_key(source, params)
    check_period(source)
    y = apply_phi(key, params, plaintext)
    if params.sigma > 0:
        rng = np.random.default_rng(noise_seed)
        y = y + rng.normal(0.0, params.sigma, params.m)
    ciphertext = Ciphertext(values=y, n=params.n, m=params.m, q=params.q, sigma=params.sigma)
    return ciphertext, key


def decrypt_with_report(
    key: SensingKey, params: SystemParams, ciphertext: Ciphertext, settings: RecoverySettings
) -> tuple[FloatArray, OmpResult]:
    """Recover the plaintext and keep the pursuit trace."""
    if not ciphertext.matches(params):
        raise ArgumentError(
            f"Ciphertext dimensions {(ciphertext.n, ciphertext.m, ciphertext.q)} "
            f"do not match N={params.n}, M={params.m}, q={params.q}"
        )
    if settings.basis.dimension != params.n:
        raise ArgumentError(f"Basis dimension {settings.basis.dimension} != N={params.n}")
    result = recover(
        lambda v: apply_phi(key, params, v),
        lambda r: apply_phi_adjoint(key, params, r),
        ciphertext.values,
        settings,
    )
    if result.excluded:
        logger.info("Pursuit skipped %d dependent columns", len(result.excluded))
    return settings.basis.synthesize(result.coefficients), result


def decrypt(
    key: SensingKey, params: SystemParams, ciphertext: Ciphertext, settings: RecoverySettings
) -> FloatArray:
    """x~ = Psi^T alpha~ with alpha~ from orthogonal matching pursuit."""
    return decrypt_with_report(key, params, ciphertext, settings)[0]


def psnr(original: npt.ArrayLike, decrypted: npt.ArrayLike, peak: float = 255.0) -> float:
    """10 log10(N peak^2 / ||x - x~||^2); ``math.inf`` marks an exact match."""
    a = np.asarray(original, dtype=np.float64)
    b = np.asarray(decrypted, dtype=np.float64)
    if a.shape != b.shape:
        raise ArgumentError(f"PSNR inputs differ in shape: {a.shape} vs {b.shape}")
    if peak <= 0:
        raise ArgumentError(f"Peak must be positive, got {peak}")
    error = float(np.sum(np.square(a - b)))
    if error == 0.0:
        return math.inf
    return 10.0 * math.log10(a.size * peak * peak / error)


def format_psnr(value: float) -> str:
    return "exact" if math.isinf(value) else f"{value:.2f}"
