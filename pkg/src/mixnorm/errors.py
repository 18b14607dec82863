"""Exception hierarchy shared by all modules."""


class MixnormError(Exception):
    """Base class for every error raised by this package."""


class ZeroModePresent(MixnormError, ValueError):
    pass


class DuplicateWavevector(MixnormError, ValueError):
    pass


class DimensionMismatch(MixnormError, ValueError):
    pass


class ConventionMismatch(MixnormError, ValueError):
    pass


class GridTooSmall(MixnormError, ValueError):
    pass


class ParameterConstraintViolated(MixnormError, ValueError):
    pass


class NegativeDiffusivity(ParameterConstraintViolated):
    pass


class DegenerateNorm(MixnormError, ArithmeticError):
    pass


class InsufficientHorizon(MixnormError, ValueError):
    pass


class NoCandidateTimes(MixnormError):
    pass


class StateCapExceeded(MixnormError, ValueError):
    pass


class HorizonExhausted(MixnormError):
    """Raised when the shell construction runs out of samples.

    The partially built decomposition is available as ``decomposition``.
    """

    def __init__(self, message, decomposition=None):
        super().__init__(message)
        self.decomposition = decomposition

    @property
    def completed(self):
        return 0 if self.decomposition is None else len(self.decomposition)


class SubsequenceUnavailable(MixnormError):
    pass


class MisalignedSeries(MixnormError, ValueError):
    pass


class DegenerateDenominator(MixnormError, ArithmeticError):
    pass


class NonPositiveValues(MixnormError, ValueError):
    pass


class WindowTooSmall(MixnormError, ValueError):
    pass


class ParseError(MixnormError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
