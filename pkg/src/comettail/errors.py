"""Exception types shared across the package."""


class CometTailError(Exception):
    """Base class for all package errors."""


class WavelengthRangeError(CometTailError):
    """Wavelength outside a Sellmeier set's validity range (no extrapolation)."""


class EvanescentOrderError(CometTailError):
    """Grating equation has no propagating solution (|sin| argument >= 1)."""


class OffRingError(CometTailError):
    """Requested point lies outside the monochromatic emission ring."""


class TooFewPointsError(CometTailError):
    """Not enough usable ridge points above the noise floor."""


class DegenerateFitError(CometTailError):
    """Fit design matrix is singular (e.g. all points at the same |y|)."""


class ConfigError(CometTailError):
    """Invalid, unknown, or missing configuration key."""
