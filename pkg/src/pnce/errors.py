"""Exception types shared across the package."""


class PnceError(Exception):
    """Base class for all errors raised by this package."""


class ZeroStateError(PnceError, ValueError):
    """LFSR initial state is zero (a fixed point that generates nothing)."""


class NotMaximalLengthError(PnceError, ValueError):
    """Observed LFSR period differs from 2**k - 1 (non-primitive polynomial)."""


class InvalidSpecError(PnceError, ValueError):
    """A specification object violates its invariants."""


class InvalidConfigError(PnceError, ValueError):
    """A configuration object violates its invariants."""


class LagOutOfRangeError(PnceError, ValueError):
    """Correlation lag outside [0, M)."""


class ShiftOutOfRangeError(PnceError, ValueError):
    """Circular shift outside [0, M)."""


class RowsOutOfRangeError(PnceError, ValueError):
    """Requested correlation row count outside [1, M]."""


class DimensionMismatchError(PnceError, ValueError):
    """Array shapes are inconsistent with the configuration."""


class FrameTooShortError(PnceError, ValueError):
    """Received frame shorter than cyclic prefix plus sequence length."""


class PlanMismatchError(PnceError, ValueError):
    """Batch plan shifts violate the minimum cyclic separation."""


class SaturationDetectedError(PnceError, ArithmeticError):
    """A stored half-precision partial result became non-finite."""


class LengthMismatchError(PnceError, ValueError):
    """Operands of a circular operation have different lengths."""


class BadMagicError(PnceError, ValueError):
    """IQ file does not start with the expected magic bytes."""


class VersionMismatchError(PnceError, ValueError):
    """IQ file version is not supported."""


class TruncatedFileError(PnceError, ValueError):
    """IQ file ends before the payload declared in its header."""


class SchemaMismatchError(PnceError, ValueError):
    """CSV header does not match the fixed result schema."""
