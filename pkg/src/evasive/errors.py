"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class EvasiveError(Exception):
    """Base class for every error raised by the toolkit."""


class SpecMismatch(EvasiveError):
    """Operands belong to different fields, or q is not a power of p."""


class DivisionByZero(EvasiveError, ZeroDivisionError):
    pass


class ZeroElement(EvasiveError, ValueError):
    pass


class ZeroPolynomial(EvasiveError, ValueError):
    pass


class NotSquare(EvasiveError, ValueError):
    pass


class ParamError(EvasiveError, ValueError):
    """Parameters violate an operation's precondition."""


class AmbientMismatch(EvasiveError, ValueError):
    pass


class MissingTowerConfig(EvasiveError):
    pass


class BudgetExceeded(EvasiveError):
    pass


class StrategyInapplicable(EvasiveError, ValueError):
    pass


class NotSpanning(EvasiveError, ValueError):
    pass


class GuardFailed(EvasiveError, ValueError):
    """A bound was requested outside the hypotheses that make it valid."""


class NoKnownScattered(EvasiveError):
    pass


class DependentPair(EvasiveError, ValueError):
    """a and b are dependent over the cubic subfield, so R_{a,b} degenerates."""


class XbarInKernel(EvasiveError, ValueError):
    pass


class NotPrimitive(EvasiveError, ValueError):
    pass


class NotSubspace(EvasiveError, ValueError):
    pass


class RecipeFailed(EvasiveError):
    pass
