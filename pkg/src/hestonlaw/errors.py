"""Exception hierarchy shared by every module."""


class HestonLawError(Exception):
    """Base class for all library errors."""


class ParameterError(HestonLawError, ValueError):
    """A parameter record failed validation."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class DomainError(HestonLawError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class PoleError(HestonLawError, ArithmeticError):
    """Evaluation hit (numerically) a pole of a meromorphic function."""

    def __init__(self, message, nearest_root=None):
        self.nearest_root = nearest_root
        super().__init__(message)


class ConsistencyError(HestonLawError, RuntimeError):
    """A guarantee of the theory was violated numerically (bracket without sign
    change, unexpected root counts, ...). Carries an optional diagnostic dump."""

    def __init__(self, message, diagnostics=None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class UnsupportedCaseError(HestonLawError, ValueError):
    """Parameter combination explicitly excluded from an operation."""


class GridError(HestonLawError, ValueError):
    """Incompatible tabulation grids."""
