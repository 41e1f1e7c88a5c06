"""Exception hierarchy shared by the numerical modules and the CLI."""


class WPCurvError(Exception):
    """Base class for all library errors."""


class DomainError(WPCurvError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(WPCurvError, ValueError):
    """A grid or run configuration cannot support the requested computation."""


class AccuracyError(WPCurvError):
    """The discretization cannot resolve the requested quantity."""


class NumericalError(WPCurvError):
    """A solver failed to reach its tolerance.

    ``diagnostics`` carries whatever the failing routine knew at the time
    (residuals, mode index, grid size).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
