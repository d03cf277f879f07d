"""Exception hierarchy shared by the library and the CLI.

Every exception carries the process exit code the CLI uses when it escapes a command.
"""


class SotsError(Exception):
    """Base class for all sparse-ots failures."""

    exit_code: int = 1


class ArgumentError(SotsError, ValueError):
    """Argument out of domain, dimension mismatch or malformed input file."""

    exit_code = 2


class ConfigurationError(ArgumentError):
    """Invalid system parameters or a degenerate generator configuration."""


class ScaleError(SotsError):
    """Instance too large for exhaustive desk-scale enumeration."""

    exit_code = 2


class BoundInvalidError(SotsError):
    """A closed-form bound is invalid or vacuous at the requested point.

    Attributes:
        required: Optional threshold that would make the bound valid (e.g. minimum q)
    """

    exit_code = 3

    def __init__(self, message: str, required: float | None = None) -> None:
        super().__init__(message)
        self.required = required


class ConditionViolatedError(BoundInvalidError):
    """Key length too short for the adversary budget (k < L*e*ln 2)."""


class InconsistentCiphertextError(SotsError):
    """Ciphertext does not decode under the assumed probe plaintext."""

    exit_code = 4


class StructuralError(InconsistentCiphertextError):
    """Extracted support violates the block structure of the sensing rows."""
