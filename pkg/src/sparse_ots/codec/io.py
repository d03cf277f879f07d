"""Ciphertext files and PGM images.

Ciphertext layout: ``SOTS`` magic, u32 N, M, q (little-endian), M float64 values, float64 sigma.
"""
import struct
from pathlib import Path

import numpy as np
import numpy.typing as npt
from PIL import Image, UnidentifiedImageError

from sparse_ots.codec.cipher import Ciphertext
from sparse_ots.core.errors import ArgumentError

MAGIC = b"SOTS"
_HEADER = struct.Struct("<4sIII")


def encode_ciphertext(ciphertext: Ciphertext) -> bytes:
    header = _HEADER.pack(MAGIC, ciphertext.n, ciphertext.m, ciphertext.q)
    body = ciphertext.values.astype("<f8").tobytes()
    return header + body + struct.pack("<d", ciphertext.sigma)


def decode_ciphertext(data: bytes) -> Ciphertext:
    if len(data) < _HEADER.size:
        raise ArgumentError("Ciphertext file is truncated")
    magic, n, m, q = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ArgumentError(f"Bad ciphertext magic {magic!r}")
    expected = _HEADER.size + 8 * m + 8
    if len(data) != expected:
        raise ArgumentError(f"Ciphertext file has {len(data)} bytes, expected {expected}")
    values = np.frombuffer(data, dtype="<f8", count=m, offset=_HEADER.size).astype(np.float64)
    (sigma,) = struct.unpack_from("<d", data, _HEADER.size + 8 * m)
    return Ciphertext(values=values, n=n, m=m, q=q, sigma=sigma)


def write_ciphertext(path: Path, ciphertext: Ciphertext) -> None:
    path.write_bytes(encode_ciphertext(ciphertext))


def read_ciphertext(path: Path) -> Ciphertext:
    if not path.exists():
        raise FileNotFoundError(f"Ciphertext not found: {path}")
    return decode_ciphertext(path.read_bytes())


def read_pgm(path: Path) -> npt.NDArray[np.uint8]:
    """Load an 8-bit binary PGM as a (rows, cols) array.

    Raises:
        FileNotFoundError: If the file does not exist
        ArgumentError: If the file is not an 8-bit grayscale PGM
    """
    if not path.exists():
        raise FileNotFoundError(f"Image not found: {path}")
    try:
        with Image.open(path) as image:
            if image.format != "PPM" or image.mode != "L":
                raise ArgumentError(f"{path} is not an 8-bit grayscale PGM")
            return np.array(image, dtype=np.uint8)
    except (UnidentifiedImageError, OSError, SyntaxError) as e:
        raise ArgumentError(f"Malformed PGM {path}: {e}") from e


def write_pgm(path: Path, pixels: npt.ArrayLike) -> None:
    """Write a P5 PGM with maxval 255."""
    array = np.asarray(pixels)
    if array.ndim != 2:
        raise ArgumentError(f"PGM needs a 2D array, got shape {array.shape}")
    Image.fromarray(np.clip(np.rint(array), 0, 255).astype(np.uint8)).save(
        path, format="PPM"
    )


def stack_columns(image: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Column-stacked plaintext vector of an image."""
    return np.asarray(image, dtype=np.float64).ravel(order="F")


def unstack_columns(x: npt.ArrayLike, rows: int, cols: int) -> npt.NDArray[np.float64]:
    return np.asarray(x, dtype=np.float64).reshape((rows, cols), order="F")
