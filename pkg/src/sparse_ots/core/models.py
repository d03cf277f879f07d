"""Pydantic models shared across sparse-ots."""
import math
from enum import Enum
from pathlib import Path
from typing import Any

try:
    from typing import Self
except ImportError:  # Python < 3.11
    from typing_extensions import Self

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from sparse_ots.core.errors import ConfigurationError

# ============================================================================
# Enums
# ============================================================================


class BasisKind(str, Enum):
    """Orthonormal sparsifying basis."""

    DCT = "dct"
    WHT = "wht"
    HAAR = "haar"
    D4 = "d4"
    IDENTITY = "identity"


class Arrangement(str, Enum):
    """How a basis acts on the plaintext vector."""

    ONE_D = "1d"
    KRONECKER_2D = "2d"  # Psi_n (x) Psi_n on column-stacked n x n images


class ExperimentKind(str, Enum):
    """Reproduction harness selected by an experiment config."""

    PHASE = "phase"
    IMAGE = "image"
    INDIST = "indist"
    TABLES = "tables"


class AttackMode(str, Enum):
    """Chosen-plaintext attack to run."""

    CLASS1 = "class1"
    CLASS2 = "class2"
    TRIAL = "trial"


# ============================================================================
# System parameters
# ============================================================================


class SystemParams(BaseModel):
    """Public dimensions and rates of one S-OTS instance.

    ``q == n`` is accepted as the dense Bernoulli special case; otherwise
    n/m <= q <= n/2 must hold.
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(gt=0, description="Plaintext dimension N")
    m: int = Field(gt=0, description="Ciphertext dimension M")
    q: int = Field(gt=0, description="Nonzeros per sensing row")
    k: int = Field(default=2, ge=2, description="Key length in bits")
    sigma: float = Field(default=0.0, ge=0.0, description="Noise standard deviation")

    @model_validator(mode="after")
    def _check_structure(self) -> Self:
        if self.n % self.q:
            raise ValueError(f"eta = N/q must be an integer (N={self.n}, q={self.q})")
        if (self.m * self.q) % self.n:
            raise ValueError(f"Mr = Mq/N must be an integer (M={self.m}, q={self.q}, N={self.n})")
        if self.q != self.n and not (self.n <= self.q * self.m and 2 * self.q <= self.n):
            raise ValueError(
                f"Need N/M <= q <= N/2 (or q = N for the dense case); "
                f"got N={self.n}, M={self.m}, q={self.q}"
            )
        if self.n < self.k:
            raise ValueError(f"Need N >= k (N={self.n}, k={self.k})")
        return self

    @classmethod
    def checked(cls, **values: Any) -> Self:
        """Build from ``values``, reporting any violation as a configuration error.

        Raises:
            ConfigurationError: If a field or the row structure is invalid
        """
        try:
            return cls.model_validate(values)
        except ValidationError as e:
            reasons = "; ".join(err["msg"] for err in e.errors())
            raise ConfigurationError(f"Invalid system parameters: {reasons}") from e

    @property
    def eta(self) -> int:
        return self.n // self.q

    @property
    def mr(self) -> int:
        """Integer M*r = M*q/N, the squared inverse scale of Phi."""
        return self.m * self.q // self.n

    @property
    def r(self) -> float:
        return self.q / self.n

    @property
    def rho(self) -> float:
        return self.m / self.n

    @property
    def tau(self) -> int:
        return math.ceil(self.k / self.q)

    @property
    def is_dense(self) -> bool:
        return self.q == self.n


# ============================================================================
# Security parameters
# ============================================================================


class IndistParams(BaseModel):
    """Parameter point of the indistinguishability bounds."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(gt=0)
    q: int = Field(gt=0)
    gamma: float = Field(gt=0.0, le=1.0, description="Minimum plaintext energy ratio")
    pnr: float = Field(default=math.inf, gt=0.0, description="PNR_max, may be infinite")
    c_max: float = Field(default=4.0, ge=1.0)

    @property
    def gamma_e(self) -> float:
        if math.isinf(self.pnr):
            return self.gamma
        return (1.0 + self.gamma * self.pnr) / (1.0 + self.pnr)

    @property
    def c(self) -> float:
        """Worst-case plaintext constant c."""
        shrink = 1.0 if math.isinf(self.pnr) else (1.0 + 1.0 / self.pnr) ** 2
        return self.c_max / shrink * ((self.gamma / self.gamma_e) ** 2 + 1.0)


class CpaParams(BaseModel):
    """Parameter point of the chosen-plaintext bounds."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=2, description="Key bits")
    q: int = Field(gt=0)
    rho: float = Field(default=0.5, gt=0.0, le=1.0, description="M/N")
    budget: float = Field(default=128.0, gt=0.0, description="Adversary log2 computing power L")
    eps2: float = Field(default=1e-5, gt=0.0, lt=1.0)
    delta: float = Field(default=0.5, le=1.0)
    eps3: float = Field(default=1e-5, gt=0.0, lt=1.0)

    @property
    def tau(self) -> int:
        return math.ceil(self.k / self.q)


class SecurityReport(BaseModel):
    """Evaluated bounds for one parameter point; absent values failed with a note."""

    cpa: CpaParams | None = None
    indist: IndistParams | None = None
    d_h_sq: float | None = None
    d_tv_low: float | None = None
    d_tv_up: float | None = None
    p_d_bound: float | None = None
    s_cpa_low_log2: float | None = None
    ssg_attack_log2: float | None = None
    q_cpa: int | None = None
    q_cpa_up: float | None = None
    p_suc_up: float | None = None
    p_key_up: float | None = None
    t_ref_up: int | None = None
    period_ok: bool | None = None
    notes: list[str] = Field(default_factory=list)

    def flat(self) -> dict[str, Any]:
        """Single-level dict of parameters and results, for CSV rows."""
        row: dict[str, Any] = {}
        if self.indist:
            row.update({f"indist_{k}": v for k, v in self.indist.model_dump().items()})
        if self.cpa:
            row.update(self.cpa.model_dump())
        for name in (
            "d_h_sq", "d_tv_low", "d_tv_up", "p_d_bound", "s_cpa_low_log2", "ssg_attack_log2",
            "q_cpa", "q_cpa_up", "p_suc_up", "p_key_up", "t_ref_up", "period_ok",
        ):
            row[name] = getattr(self, name)
        row["notes"] = "; ".join(self.notes)
        return row


# ============================================================================
# Attack output
# ============================================================================


class AttackRecord(BaseModel):
    """One attack run, serialized as a JSON line."""

    mode: AttackMode
    s_cpa_log2: float | None = Field(default=None, serialization_alias="S_CPA_log2")
    feasible: bool = False
    stage1_success: bool = False
    stage2_success: bool = False
    work: int = 0
    consistent_keys: int | None = None
    permutation_log2: float | None = None


# ============================================================================
# Experiment configuration
# ============================================================================


class ExperimentConfig(BaseModel):
    """Configuration of a reproduction harness run.

    Loaded from a key=value file and CLI overrides; list fields accept comma-separated
    strings.
    """

    kind: ExperimentKind = ExperimentKind.PHASE
    n: int = 256
    m: int = 128
    q: int = 32
    degree: int = 64
    sigma: float = Field(default=0.0, ge=0.0)
    basis: BasisKind = BasisKind.DCT
    sparsity: int | None = None
    rho_step: float = Field(default=1 / 32, gt=0.0)
    kappa_step: float = Field(default=0.01, gt=0.0)
    kappa_max: float = Field(default=1.0, gt=0.0)
    rho_values: list[float] | None = None
    trials: int = Field(default=200, ge=1)
    threshold: float = Field(default=0.99, gt=0.0, lt=1.0)
    gammas: list[float] = Field(default_factory=lambda: [0.25, 0.5, 0.9, 1.0])
    image_side: int = Field(default=64, gt=1)
    seed: int = Field(default=0, ge=0)
    workers: int = Field(default=1, ge=1)
    output: Path | None = None

    @field_validator("rho_values", "gammas", mode="before")
    @classmethod
    def _split_csv(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [float(v) for v in value.split(",") if v.strip()]
        return value

    def system_params(self, **overrides: Any) -> SystemParams:
        values: dict[str, Any] = {
            "n": self.n, "m": self.m, "q": self.q, "k": min(self.degree, self.n),
            "sigma": self.sigma,
        }
        values.update(overrides)
        return SystemParams.checked(**values)


class BoundGrids(BaseModel):
    """Sweep ranges for the bound tables. An empty list yields a header-only table."""

    k: int = Field(default=256, ge=2)
    budget: float = Field(default=128.0, gt=0.0)
    rho: float = Field(default=0.5, gt=0.0, le=1.0)
    m: int = Field(default=256, gt=0)
    c_max: float = Field(default=4.0, ge=1.0)
    eps2: float = Field(default=1e-5, gt=0.0, lt=1.0)
    delta: float = Field(default=0.5, le=1.0)
    eps3: float = Field(default=1e-5, gt=0.0, lt=1.0)
    gammas: list[float] = Field(default_factory=lambda: [round(0.05 * j, 2) for j in range(1, 21)])
    indist_q: list[int] = Field(default_factory=lambda: [48, 64, 128, 256])
    q_values: list[int] = Field(default_factory=lambda: list(range(8, 520, 8)))
    eps2_values: list[float] = Field(default_factory=lambda: [10.0**-e for e in range(1, 11)])
    budgets: list[float] = Field(default_factory=lambda: [64.0, 96.0, 128.0])

    @field_validator("gammas", "indist_q", "q_values", "eps2_values", "budgets", mode="before")
    @classmethod
    def _split_csv(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [v for v in value.split(",") if v.strip()]
        return value
