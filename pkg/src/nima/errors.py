"""Exception types shared across the package."""


class NimaError(Exception):
    """Base class for all package-specific errors."""


class DegenerateOrientationError(NimaError):
    """Orientation cannot be recovered (e.g. zero acceleration vector)."""


class InsufficientDataError(NimaError):
    """Too few samples for the requested operation."""


class SingularSystemError(NimaError):
    """Design matrix is rank deficient; the message names the deficient direction."""


class UnobservableRotationError(NimaError):
    """Force directions are collinear; the inter-sensor rotation is unobservable."""


class ConvergenceError(NimaError):
    """Iterative solver failed to converge; carries the final residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DataError(NimaError):
    """Input data violates a precondition (non-finite values, bad shapes)."""


class TrainingDivergedError(NimaError):
    """Network training loss exceeded the divergence threshold."""


class ResamplingRequiredError(NimaError):
    """Stream timestamps are too non-uniform for finite differencing."""


class PoorlyExcitedError(NimaError):
    """Identification window lacks excitation; carries conditioning diagnostics."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class NoModelError(NimaError):
    """No impedance model could be identified at any candidate degree."""


class ConfigError(NimaError):
    """Configuration file is invalid (unknown keys, missing files, bad ranges)."""
