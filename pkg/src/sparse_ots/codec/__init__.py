"""Legitimate encryption/decryption path."""
from sparse_ots.codec.cipher import (
    Ciphertext,
    check_period,
    decrypt,
    decrypt_with_report,
    encrypt,
    format_psnr,
    keystream_budget,
    max_encryptions,
    pnr_of,
    psnr,
    sigma_for_pnr,
)
from sparse_ots.codec.io import (
    decode_ciphertext,
    encode_ciphertext,
    read_ciphertext,
    read_pgm,
    stack_columns,
    unstack_columns,
    write_ciphertext,
    write_pgm,
)
from sparse_ots.codec.omp import (
    OmpResult,
    RecoverySettings,
    orthogonal_matching_pursuit,
    recover,
)

__all__ = [
    "Ciphertext",
    "OmpResult",
    "RecoverySettings",
    "check_period",
    "decode_ciphertext",
    "decrypt",
    "decrypt_with_report",
    "encode_ciphertext",
    "encrypt",
    "format_psnr",
    "keystream_budget",
    "max_encryptions",
    "orthogonal_matching_pursuit",
    "pnr_of",
    "psnr",
    "read_ciphertext",
    "read_pgm",
    "recover",
    "sigma_for_pnr",
    "stack_columns",
    "unstack_columns",
    "write_ciphertext",
    "write_pgm",
]
