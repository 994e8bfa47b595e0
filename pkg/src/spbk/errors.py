"""Exception hierarchy shared across the package."""


class SpbkError(Exception):
    """Base class for all errors raised by this package."""


class SizingError(SpbkError):
    """Input has too few rows/elements for the requested operation."""


class DomainError(SpbkError):
    """A coordinate lies outside the unit interval it must belong to."""


class ParameterError(SpbkError):
    """A tuning parameter violates its admissible range."""


class DegenerateAxisError(SpbkError):
    """A predictor column is constant (zero spread)."""


class DegenerateDesignError(SpbkError):
    """Every design column was judged numerically rank deficient."""


class EmptyWindowError(SpbkError):
    """No observation falls inside the kernel window around ``x0``."""

    def __init__(self, x0, h):
        super().__init__(f"no data within bandwidth h={h:g} of x0={x0:g}")
        self.x0 = x0
        self.h = h


class DegenerateEfficiencyError(SpbkError):
    """Relative-efficiency denominator (estimator error sum) is zero."""


class StudyError(SpbkError):
    """Too many replications of a Monte Carlo study failed."""


class CsvParseError(SpbkError):
    """A CSV cell could not be parsed; carries file location context."""

    def __init__(self, path, line, message, column=None):
        loc = f"{path}:{line}" if column is None else f"{path}:{line}:{column}"
        super().__init__(f"{loc}: {message}")
        self.path = path
        self.line = line
        self.column = column


class ConfigError(SpbkError):
    """Invalid run configuration (CLI flags or config file)."""
