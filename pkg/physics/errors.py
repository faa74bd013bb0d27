from dataclasses import dataclass
from enum import Enum
from typing import List


class TwinBeamError(Exception):
    """Base class for every error raised by the simulation."""


class ViolationKind(Enum):
    NON_POSITIVE_PARAMETER = "NonPositiveParameter"
    BELOW_THRESHOLD_CHANNEL = "BelowThresholdChannel"
    NEGATIVE_CONJUGATE_FREQUENCY = "NegativeConjugateFrequency"
    INCONSISTENT_ENERGIES = "InconsistentEnergies"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    message: str

    def __str__(self) -> str:
        return f"{self.kind.value}: {self.message}"


class ConfigError(TwinBeamError, ValueError):
    """Malformed configuration file (missing file, unknown keys, bad types)."""


class ConfigValidationError(ConfigError):
    """Physical configuration violates one or more invariants."""

    def __init__(self, violations: List[Violation]):
        self.violations = list(violations)
        lines = "\n  ".join(str(v) for v in self.violations)
        super().__init__(f"{len(self.violations)} config violation(s):\n  {lines}")

    @property
    def kinds(self) -> List[ViolationKind]:
        return [v.kind for v in self.violations]


class EmptyGridError(TwinBeamError, ValueError):
    pass


class TableMissingChannelError(TwinBeamError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "dipole table is missing a channel"


class DimensionMismatchError(TwinBeamError, ValueError):
    pass


class DefectiveMatrixError(TwinBeamError, RuntimeError):
    """Eigenvector matrix too ill-conditioned for the eigen propagator."""


class UnsupportedOrderError(TwinBeamError, ValueError):
    pass


class NonRealVarianceError(TwinBeamError, RuntimeError):
    pass


class ZeroSNLError(TwinBeamError, ZeroDivisionError):
    pass


class TruncationInsufficientError(TwinBeamError, RuntimeError):
    pass


class SingularQuadraticFormError(TwinBeamError, RuntimeError):
    pass


class CalibrationError(TwinBeamError, ValueError):
    """Dipole calibration target that no rescaling can reach."""


class NonPositiveVarianceError(TwinBeamError, ValueError):
    pass
