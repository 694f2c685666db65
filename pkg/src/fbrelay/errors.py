"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of a function."""


class ConvergenceError(ArithmeticError):
    """A series, continued fraction or quadrature did not reach tolerance."""


class MethodMismatchError(ValueError):
    """A solution method was requested for inputs it does not cover."""


class InfeasibleError(RuntimeError):
    """No operating point satisfies the requested reliability target."""


class ConfigError(ValueError):
    """A run configuration could not be parsed into a valid scenario."""
