"""Exception types raised across fraclab."""


class ConfigurationError(ValueError):
    """Invalid parameters, corpus entries or config files.

    ``path`` names the offending config field when the error comes from a
    config file.
    """

    def __init__(self, message, path=None):
        super().__init__(message)
        self.path = path

    def __str__(self):
        msg = super().__str__()
        return f"{self.path}: {msg}" if self.path else msg


class SingularEvaluationError(ArithmeticError):
    """A kernel was evaluated on (or numerically at) its singular set."""


class InsufficientResolutionError(ValueError):
    """A quadrature grid is too coarse; ``required`` gives the minimum count."""

    def __init__(self, message, required):
        super().__init__(message)
        self.required = required


class CostLimitError(ValueError):
    """Direct quadrature would exceed the configured evaluation budget."""
