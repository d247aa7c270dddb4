"""Exception types shared across the package."""


class LassoWaveError(Exception):
    """Base class for all package errors."""


class NonCommensurate(LassoWaveError):
    """Edge lengths are not integer multiples of the requested grid step."""


class UnsupportedBC(LassoWaveError):
    """Boundary condition outside the pure Dirichlet/Neumann pair."""


class BadBC(LassoWaveError):
    """Boundary-condition coefficients invalid for the requested evaluation."""


class NonFinite(LassoWaveError):
    """An iteration produced NaN or Inf."""


class SingularDiagonal(LassoWaveError):
    """Collocation diagonal vanished; the step is too coarse."""


class HorizonExceeded(LassoWaveError):
    """Evaluation point lies outside the resolved kernel horizon."""


class CFLViolation(LassoWaveError):
    """Time step too large for the explicit scheme."""


class DegenerateAmplitude(LassoWaveError):
    """Calibration amplitude of a bump control is numerically zero."""


class TargetNotH10(LassoWaveError):
    """Shape target violates vertex continuity required of H^1_0."""


class ScanTooCoarse(LassoWaveError):
    """Root scan detected adjacent roots closer than two scan steps."""


class ClusterNotFound(LassoWaveError):
    """No two-root cluster inside the requested disk."""


class SynthesisError(LassoWaveError):
    """A control-synthesis stage failed; carries the stage name."""

    def __init__(self, stage, message):
        self.stage = stage
        super().__init__(f"stage '{stage}': {message}")


class ConfigError(LassoWaveError):
    """Invalid or incomplete run configuration."""
