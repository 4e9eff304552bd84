"""Exception types raised by the qfirob modules."""


class QfirobError(Exception):
    """Base class for all qfirob errors."""


class NonHermitianInput(QfirobError):
    """A matrix that must be Hermitian is not, beyond tolerance."""


class DimensionMismatch(QfirobError):
    """Operator/state dimensions are incompatible."""


class UnsupportedOrder(QfirobError):
    """Central moments are only provided for orders 1..3."""


class ZeroCleanQfi(QfirobError):
    """The clean QFI vanishes, so the disorder marker is undefined."""


class MissingThirdOrder(QfirobError):
    """Skewness corrections were requested from a second-order report."""


class EmptyGrid(QfirobError):
    """A search grid contains no points."""


class InsufficientWindow(QfirobError):
    """Fewer than three sweep points fall inside the fit window."""


class NoSignChange(QfirobError):
    """The scanned marker does not change sign on the grid."""


class SingularField(QfirobError):
    """Closed forms are singular at vanishing field strength."""


class SingularPoint(QfirobError):
    """The optimal-phase formula is singular at this parameter point."""


class DegenerateSigmas(QfirobError):
    """Equal transverse disorder strengths leave the phase free."""


class LengthMismatch(QfirobError):
    """A coupling vector has the wrong length for the chain size."""


class InvalidSize(QfirobError):
    """Chain too small for the sector-split correlation treatment."""


class TooLarge(QfirobError):
    """Dense many-body construction requested beyond the supported size."""


class ConfigError(QfirobError):
    """A run configuration failed to parse or validate."""
