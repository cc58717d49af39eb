"""Exception types shared across the package."""


class FluxstarkError(Exception):
    """Base class for all package errors."""


class ConvergenceError(FluxstarkError):
    """A numerical procedure did not reach its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class LabelingError(FluxstarkError):
    """Coupled eigenstates could not be assigned product labels."""

    def __init__(self, message, overlaps=None):
        super().__init__(message)
        self.overlaps = overlaps


class NoRootError(FluxstarkError):
    """A bracketing root search found no sign change."""


class FitError(FluxstarkError):
    """A model fit failed or is not identifiable."""


class ConfigError(FluxstarkError):
    """A configuration file is malformed or violates an invariant."""

    def __init__(self, message, path=None, line=None, column=None):
        loc = ""
        if path:
            loc += f" at '{path}'"
        if line is not None:
            loc += f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + loc)
        self.path = path
        self.line = line
        self.column = column
