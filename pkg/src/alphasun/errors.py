class AlphaSunError(Exception):
    """Base class for numerical failures raised by this package."""


class DomainError(AlphaSunError, ValueError):
    pass


class EvaluationError(AlphaSunError, ArithmeticError):
    """A series or quadrature did not reach its target.

    ``diagnostics`` carries whatever partial information is available
    (partial sums, last terms, residual histories).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class SolverError(EvaluationError):
    pass


class ConfigurationError(AlphaSunError, ValueError):
    pass


class PreconditionError(AlphaSunError, ValueError):
    pass
