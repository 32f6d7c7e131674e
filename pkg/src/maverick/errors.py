"""Exception hierarchy shared by every module of the package."""


class MaverickError(Exception):
    """Base class for all errors raised by this package."""


class NotNormalized(MaverickError, ValueError):
    pass


class ShapeMismatch(MaverickError, ValueError):
    pass


class DimensionMismatch(MaverickError, ValueError):
    pass


class OutOfRange(MaverickError, ValueError):
    pass


class TooLarge(MaverickError, ValueError):
    """The requested enumeration or simulation exceeds its size bound."""


class ModeUnsupported(MaverickError, ValueError):
    pass


class NotAWorld(MaverickError, ValueError):
    """A basis string with zero amplitude was given where a branch is required."""


class NegativeEigenvalue(MaverickError, ValueError):
    pass


class NonpositiveThreshold(MaverickError, ValueError):
    pass


class ConfigInvalid(MaverickError, ValueError):
    """A sweep configuration failed validation.

    ``field`` names the offending key so callers can report it.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
