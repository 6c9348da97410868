"""Exception hierarchy shared by all rank_extremes modules."""


class RankExtremesError(Exception):
    """Base class for all package errors."""


class ParameterError(RankExtremesError, ValueError):
    """A parameter is outside its admissible range."""


class DataError(RankExtremesError, ValueError):
    """Input data make the requested computation undefined."""


class ConfigurationError(RankExtremesError, ValueError):
    """An experiment or model configuration is inconsistent."""


class ConvergenceError(RankExtremesError, RuntimeError):
    """An iterative procedure exhausted its iteration budget."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ResourceError(RankExtremesError, RuntimeError):
    """A request would exceed the configured resource bounds."""
