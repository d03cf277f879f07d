"""Keystream generation: LFSR, self-shrinking generator and key files."""
from sparse_ots.keystream.keyfile import KeyFile, generate_key, read_key_file, write_key_file
from sparse_ots.keystream.lfsr import (
    PRIMITIVE_TAPS,
    Key,
    KeystreamSource,
    LfsrSpec,
    balance_statistic,
    generate_raw,
    lfsr_next,
    ssg_next_bipolar,
    ssg_prefix,
    take_bits,
)

__all__ = [
    "PRIMITIVE_TAPS",
    "Key",
    "KeyFile",
    "KeystreamSource",
    "LfsrSpec",
    "balance_statistic",
    "generate_key",
    "generate_raw",
    "lfsr_next",
    "read_key_file",
    "ssg_next_bipolar",
    "ssg_prefix",
    "take_bits",
    "write_key_file",
]
