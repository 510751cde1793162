"""Exception hierarchy shared by the library and the command line tool."""


class NomaError(Exception):
    """Base class for all errors raised by nomaiot."""


class DomainError(NomaError, ValueError):
    """An argument lies outside the domain of a numerical kernel."""


class ConfigError(NomaError, ValueError):
    """A scenario or sweep description violates one of its invariants."""


class PreconditionError(NomaError, ValueError):
    """An estimator was asked to evaluate a configuration it does not cover."""


class ConvergenceError(NomaError, ArithmeticError):
    """A series, quadrature or derivative stencil failed to converge."""
