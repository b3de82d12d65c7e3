"""Exception hierarchy shared by all pxbar modules."""


class PxbarError(Exception):
    """Base class for every error raised by pxbar."""


class ParseError(PxbarError, ValueError):
    """A data file could not be parsed."""


class InvariantError(PxbarError, ValueError):
    """Parsed data violates a record invariant."""


class OutOfRange(PxbarError, ValueError):
    """A wavelength lies outside a material table span."""


class DomainError(PxbarError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DimensionError(PxbarError, ValueError):
    """Vector or matrix shapes do not agree."""


class SingularNetwork(PxbarError, ArithmeticError):
    """The resistive network has no unique solution."""


class TargetOutOfRange(PxbarError, ValueError):
    """A programming target cannot be represented by the device."""


class MaxPulsesExceeded(PxbarError, RuntimeError):
    """Program-and-verify gave up; ``log`` holds the partial pulse log."""

    def __init__(self, message, log=None):
        super().__init__(message)
        self.log = log


class AngleOutOfRange(PxbarError, ValueError):
    """Crossing angle outside (0, 180) degrees."""


class ConfigError(PxbarError):
    """Configuration file missing, malformed or inconsistent."""


class SchemaError(PxbarError):
    """An input CSV does not conform to its schema."""


class DegenerateWeightsWarning(UserWarning):
    """All weights are zero; the fallback conductance scale was used."""


class SaturationWarning(UserWarning):
    """An encoded read voltage exceeded v_read and was clipped."""
