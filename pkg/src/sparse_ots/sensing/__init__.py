"""Per-encryption sparse measurement operator."""
from sparse_ots.sensing.operator import (
    SensingKey,
    apply_phi,
    apply_phi_adjoint,
    build_sensing_key,
    dump_key,
    index_set,
)
from sparse_ots.sensing.permutation import generate_permutation

__all__ = [
    "SensingKey",
    "apply_phi",
    "apply_phi_adjoint",
    "build_sensing_key",
    "dump_key",
    "generate_permutation",
    "index_set",
]
