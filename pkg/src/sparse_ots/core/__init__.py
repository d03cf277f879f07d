"""Core models and errors."""
from sparse_ots.core.errors import (
    ArgumentError,
    BoundInvalidError,
    ConditionViolatedError,
    ConfigurationError,
    InconsistentCiphertextError,
    ScaleError,
    SotsError,
    StructuralError,
)
from sparse_ots.core.models import (
    Arrangement,
    AttackMode,
    AttackRecord,
    BasisKind,
    BoundGrids,
    CpaParams,
    ExperimentConfig,
    ExperimentKind,
    IndistParams,
    SecurityReport,
    SystemParams,
)

__all__ = [
    "ArgumentError",
    "Arrangement",
    "AttackMode",
    "AttackRecord",
    "BasisKind",
    "BoundGrids",
    "BoundInvalidError",
    "ConditionViolatedError",
    "ConfigurationError",
    "CpaParams",
    "ExperimentConfig",
    "ExperimentKind",
    "InconsistentCiphertextError",
    "IndistParams",
    "ScaleError",
    "SecurityReport",
    "SotsError",
    "StructuralError",
    "SystemParams",
]
