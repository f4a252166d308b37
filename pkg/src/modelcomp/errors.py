"""Exception hierarchy shared by all modules."""


class ModelcompError(Exception):
    """Base class for all errors raised by this package."""


class PointOutsideDomain(ModelcompError, ValueError):
    pass


class EvaluationAtEssentialSingularity(ModelcompError, ValueError):
    pass


class NotSelfMap(ModelcompError, ValueError):
    pass


class CompositionTooDeep(ModelcompError, ValueError):
    pass


class ZeroNotInterior(ModelcompError, ValueError):
    pass


class NotTangent(ModelcompError, ValueError):
    pass


class NotContained(ModelcompError, ValueError):
    pass


class TruncationBudgetExceeded(ModelcompError, ArithmeticError):
    pass


class NoConvergence(ModelcompError, ArithmeticError):
    pass


class TargetEqualsPhiOfZero(ModelcompError, ValueError):
    pass


class GridTooCoarse(ModelcompError, ArithmeticError):
    pass


class HypothesisViolated(ModelcompError, ValueError):
    pass


class BoundaryValueUnavailable(ModelcompError, ValueError):
    pass


class DensityPole(ModelcompError, ZeroDivisionError):
    pass


class NonConvergent(ModelcompError, ArithmeticError):
    """Oscillating limit; ``curve`` holds the raw (radius, quotient) samples."""

    def __init__(self, message, curve=None):
        super().__init__(message)
        self.curve = curve


class ConfigError(ModelcompError, ValueError):
    """Invalid configuration; ``pointer`` is a JSON pointer to the offending node."""

    def __init__(self, message, pointer=""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer
