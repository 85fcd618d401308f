"""Exception types shared across the package."""


class FoaToolsError(Exception):
    """Base class for all errors raised by this package."""


class InvalidRotationError(FoaToolsError, ValueError):
    """Matrix is not orthogonal with determinant +1."""


class InvalidWindowError(FoaToolsError, ValueError):
    """Analysis window is empty or out of bounds."""


class GridMismatchError(FoaToolsError, ValueError):
    """Two energy maps do not share the same sphere grid."""


class IncompatibleClipsError(FoaToolsError, ValueError):
    """Clips differ in length or sample rate."""


class UndefinedMetricError(FoaToolsError):
    """Metric is undefined for the given inputs (e.g. zero variance)."""


class NoUsableWindowsError(FoaToolsError):
    """Every analysis window of a granularity was skipped."""


class InsufficientSamplesError(FoaToolsError, ValueError):
    """Too few observations to estimate statistics."""


class NotPositiveSemidefiniteError(FoaToolsError, ValueError):
    """Covariance eigenvalues are negative beyond tolerance."""


class MalformedPatternError(FoaToolsError, ValueError):
    """Padding layout of a reorganized code matrix does not match its pattern."""


class NoEnergyError(FoaToolsError):
    """Energy map is identically zero; no dominant direction exists."""


class TensorIOError(FoaToolsError, ValueError):
    """Base class for serialization errors."""


class HeaderParseError(TensorIOError):
    """File header is missing or syntactically invalid."""


class UnknownDtypeError(TensorIOError):
    """Header declares a dtype this package does not support."""


class PayloadSizeError(TensorIOError):
    """Payload byte count does not match the header."""


class WavFormatError(TensorIOError):
    """RIFF/WAVE structure is invalid or unsupported."""
