"""Exception hierarchy shared by every ffkit module."""


class FFKitError(Exception):
    """Base class for all toolkit errors."""


class NonFinite(FFKitError, ValueError):
    pass


class NonSymmetric(FFKitError, ValueError):
    pass


class RankDeficient(FFKitError, ValueError):
    pass


class NotPositiveDefinite(FFKitError, ValueError):
    pass


class NotConverged(FFKitError, ArithmeticError):
    pass


class DimensionMismatch(FFKitError, ValueError):
    pass


class InvalidParams(FFKitError, ValueError):
    pass


class NotTight(FFKitError, ValueError):
    pass


class NotEquiDimensional(FFKitError, ValueError):
    pass


class SingularModel(FFKitError, ArithmeticError):
    pass


class NotWhiteSignal(FFKitError, ValueError):
    """Erasure analytics are only defined for R_xx = sigma_x^2 I."""


class ConstructionFailed(FFKitError, RuntimeError):
    """A construction did not pass its certification gate."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class FrameFormatError(FFKitError, ValueError):
    """A frame document could not be parsed or validated."""
