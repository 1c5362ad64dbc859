"""Exception types shared across the package."""


class FairlabError(Exception):
    """Base class for all package-specific errors."""


class InvalidSpecError(FairlabError, ValueError):
    """A dataset or experiment specification violates its invariants."""


class ParseError(FairlabError, ValueError):
    """A CSV or JSON input could not be parsed; message names the location."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DegenerateWeightsError(FairlabError, ValueError):
    """All record weights are zero, so weighted resampling is undefined."""


class UndefinedMetricError(FairlabError, ValueError):
    """A metric's preconditions do not hold (missing group, empty cell, zero denominator)."""


class DegenerateVarianceError(UndefinedMetricError):
    """Within-group variation is zero, so the skew ratio is undefined."""


class UndefinedRepairError(FairlabError, ValueError):
    """A repairer's preconditions do not hold; message names the offending group or cell."""


class DivergenceError(FairlabError, RuntimeError):
    """An iterative fit produced a non-finite loss; message reports the iteration."""

    def __init__(self, message, iteration=None):
        if iteration is not None:
            message = f"iteration {iteration}: {message}"
        super().__init__(message)
        self.iteration = iteration
