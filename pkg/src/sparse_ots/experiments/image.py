"""Image encryption round trip: PGM in, ciphertext plus decrypted PGM out."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import numpy.typing as npt

from sparse_ots.codec.cipher import decrypt, encrypt, psnr
from sparse_ots.codec.io import (
    read_pgm,
    stack_columns,
    unstack_columns,
    write_ciphertext,
    write_pgm,
)
from sparse_ots.codec.omp import RecoverySettings
from sparse_ots.core.errors import ArgumentError
from sparse_ots.core.models import Arrangement, BasisKind, ExperimentConfig, SystemParams
from sparse_ots.experiments.runner import item_rng, random_state
from sparse_ots.keystream.lfsr import Key, KeystreamSource, LfsrSpec
from sparse_ots.transforms.bases import Basis

logger = logging.getLogger(__name__)

IMAGE_HEADER = ("image", "N", "q", "rho", "basis", "psnr_db")


@dataclass(frozen=True)
class ImageResult:
    """Files written by one pipeline run and the recovery quality."""

    name: str
    params: SystemParams
    basis: BasisKind
    psnr_db: float
    ciphertext_path: Path
    decrypted_path: Path
    encrypted_view_path: Path

    def as_row(self) -> dict[str, object]:
        return {
            "image": self.name,
            "N": self.params.n,
            "q": self.params.q,
            "rho": self.params.rho,
            "basis": self.basis,
            "psnr_db": self.psnr_db,
        }


def synthetic_image(n: int) -> npt.NDArray[np.uint8]:
    """Deterministic piecewise-smooth n x n test image: shaded background, a disc, a bar."""
    if n < 2:
        raise ArgumentError(f"Image side must be >= 2, got {n}")
    u = np.linspace(0.0, 1.0, n)
    xx, yy = np.meshgrid(u, u)
    image = 60.0 + 90.0 * xx + 35.0 * np.sin(2.0 * np.pi * yy)
    disc = (xx - 0.6) ** 2 + (yy - 0.4) ** 2 < 0.05
    image[disc] = 215.0 - 50.0 * yy[disc]
    bar = (xx > 0.12) & (xx < 0.38) & (yy > 0.62) & (yy < 0.88)
    image[bar] = 25.0
    return np.clip(np.rint(image), 0, 255).astype(np.uint8)


def image_params(config: ExperimentConfig, n: int) -> SystemParams:
    """Scale the configured dimensions to an image of ``n`` pixels, keeping M/N.

    ``q == n`` in the config selects the dense case at the image size.
    """
    m = round(config.m * n / config.n)
    q = n if config.q == config.n else config.q
    return config.system_params(n=n, m=m, q=q, k=min(config.degree, n))


def encrypted_view(values: npt.ArrayLike, side: int) -> npt.NDArray[np.uint8]:
    """Measurements laid out column-wise on a side-row canvas, rescaled to 0..255."""
    y = np.asarray(values, dtype=np.float64)
    cols = math.ceil(y.size / side)
    canvas = np.full(side * cols, y.min() if y.size else 0.0)
    canvas[: y.size] = y
    low, high = float(canvas.min()), float(canvas.max())
    scaled = np.zeros_like(canvas) if high == low else (canvas - low) * (255.0 / (high - low))
    return np.rint(unstack_columns(scaled, side, cols)).astype(np.uint8)


def _check_side(pixels: npt.NDArray[np.uint8]) -> int:
    rows, cols = pixels.shape
    if rows != cols:
        raise ArgumentError(f"Image must be square, got {rows} x {cols}")
    if rows & (rows - 1):
        raise ArgumentError(f"Image side must be a power of two, got {rows}")
    return rows


def run_image_pipeline(
    config: ExperimentConfig,
    image_path: Path | None,
    out_dir: Path,
    *,
    tolerance: float = 1e-6,
    source: KeystreamSource | None = None,
) -> ImageResult:
    """Encrypt a column-stacked image, decrypt it with the true key and write the artifacts.

    Without ``image_path`` the synthetic test image of side ``config.image_side`` is used.
    PSNR is measured on the 8-bit decrypted image that is written out.
    """
    if image_path is not None:
        pixels = read_pgm(image_path)
        name = image_path.stem
    else:
        pixels = synthetic_image(config.image_side)
        name = f"synthetic{config.image_side}"
    side = _check_side(pixels)
    n = side * side
    params = image_params(config, n)
    basis = Basis(config.basis, n, Arrangement.KRONECKER_2D)
    sparsity = min(config.sparsity or max(1, params.m // 4), params.m)

    if source is None:
        rng = item_rng(config.seed, 0, 0)
        spec = LfsrSpec.primitive(params.k)
        source = KeystreamSource(spec, Key(params.k, random_state(rng, params.k)))
    x = stack_columns(pixels)
    ciphertext, key = encrypt(source, params, x, noise_seed=config.seed)
    recovered = decrypt(key, params, ciphertext, RecoverySettings(sparsity, basis, tolerance))
    decrypted = np.clip(np.rint(unstack_columns(recovered, side, side)), 0, 255)
    quality = psnr(pixels, decrypted)
    logger.info("%s: N=%d q=%d K=%d PSNR=%.2f dB", name, n, params.q, sparsity, quality)

    out_dir.mkdir(parents=True, exist_ok=True)
    ciphertext_path = out_dir / f"{name}.sots"
    decrypted_path = out_dir / f"{name}_decrypted.pgm"
    view_path = out_dir / f"{name}_encrypted.pgm"
    write_ciphertext(ciphertext_path, ciphertext)
    write_pgm(decrypted_path, decrypted)
    write_pgm(view_path, encrypted_view(ciphertext.values, side))
    return ImageResult(
        name=name,
        params=params,
        basis=config.basis,
        psnr_db=quality,
        ciphertext_path=ciphertext_path,
        decrypted_path=decrypted_path,
        encrypted_view_path=view_path,
    )
