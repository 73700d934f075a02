"""Exception hierarchy shared by all fairscore modules."""


class FairscoreError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(FairscoreError):
    """Bad input data or configuration; maps to CLI exit code 2."""


class DimensionError(ValidationError):
    """Score dimensionality routed to the wrong code path (1-D vs n-D)."""


class ConvergenceError(FairscoreError):
    """An iterative solver failed to converge; carries diagnostics."""

    def __init__(self, message, *, iterations=None, marginal_error=None):
        super().__init__(message)
        self.iterations = iterations
        self.marginal_error = marginal_error


class OracleGuardError(ValidationError):
    """A brute-force oracle was asked for an instance above its size guard."""
