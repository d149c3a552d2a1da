"""Exception types raised by qpos."""


class QposError(Exception):
    """Base class for every error raised by this package."""


class NonExactDivision(QposError, ArithmeticError):
    """Polynomial division left a remainder."""


class NonIntegralExponent(QposError, ValueError):
    """An exponent built from rational parameters is not an integer."""


class ParameterError(QposError, ValueError):
    """Parameters violate a precondition (RANGE)."""


class NegativeSize(ParameterError):
    """The requested size leaves N or M negative."""


class ParityError(ParameterError):
    pass


class OutOfDomain(ParameterError):
    pass


class NonCombinatorial(ParameterError):
    """The partition interpretation needs integer alpha and beta."""
