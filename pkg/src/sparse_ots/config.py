"""Application configuration using pydantic-settings."""
from functools import lru_cache
from pathlib import Path
from typing import Any

from dotenv import dotenv_values
from pydantic_settings import BaseSettings, SettingsConfigDict

from sparse_ots.core.errors import ConfigurationError
from sparse_ots.core.models import BoundGrids, ExperimentConfig, ExperimentKind


class Settings(BaseSettings):
    """Application settings loaded from SOTS_* environment variables or a .env file."""

    model_config = SettingsConfigDict(
        env_prefix="SOTS_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Key generation
    default_degree: int = 256

    # Experiments
    default_seed: int = 0
    workers: int = 1

    # Decryption
    omp_tolerance: float = 1e-6

    # Diagnostics
    log_level: str = "WARNING"
    warn_period_reuse: bool = True


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Get application settings (cached)."""
    return Settings()


def read_config_file(path: Path) -> dict[str, str]:
    """Parse a ``key=value`` file; ``#`` starts a comment, keys are case-insensitive.

    Raises:
        FileNotFoundError: If the file does not exist
    """
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")
    return {k.strip().lower(): v for k, v in dotenv_values(path).items() if v is not None}


def _harness_values(
    path: Path | None, kind: ExperimentKind | None, overrides: dict[str, Any]
) -> dict[str, Any]:
    """File values under non-None overrides, with ``kind=`` checked against the harness."""
    values: dict[str, Any] = read_config_file(path) if path is not None else {}
    values.update({k: v for k, v in overrides.items() if v is not None})
    if kind is None:
        return values
    declared = values.setdefault("kind", kind.value)
    try:
        matches = ExperimentKind(declared) == kind
    except ValueError as e:
        raise ConfigurationError(f"Unknown experiment kind {declared!r} in {path}") from e
    if not matches:
        raise ConfigurationError(
            f"Config {path} is for the {declared} harness, not {kind.value}"
        )
    return values


def load_experiment_config(
    path: Path | None = None, kind: ExperimentKind | None = None, **overrides: Any
) -> ExperimentConfig:
    """Build an ExperimentConfig from defaults, then the file, then non-None overrides.

    Raises:
        ConfigurationError: If the file declares a ``kind`` other than ``kind``
    """
    return ExperimentConfig.model_validate(_harness_values(path, kind, overrides))


def load_bound_grids(path: Path | None = None, **overrides: Any) -> tuple[BoundGrids, Path | None]:
    """Bound-table grids and the ``output=`` directory of a tables config, if any."""
    values = _harness_values(path, ExperimentKind.TABLES, overrides)
    values.pop("kind")
    output = values.pop("output", None)
    return BoundGrids.model_validate(values), Path(output) if output else None
