"""Exception hierarchy shared by every module of the package."""


class CFMMError(Exception):
    """Base class for domain errors raised by :mod:`cfmm`."""


class DimensionMismatch(CFMMError, ValueError):
    pass


class NonBracketing(CFMMError, ValueError):
    """The predicate takes the same value at both ends of a bracket."""


class NoBracketFound(CFMMError):
    """Bracket expansion exhausted its range without seeing the predicate flip."""


class MaxIterExceeded(CFMMError):
    pass


class ZeroLiquidity(CFMMError):
    """The canonical trading function vanishes, so reserves cannot be rescaled."""


class NonSmoothPoint(CFMMError):
    """One-sided derivatives disagree: the function has a kink here."""


class Unsupported(CFMMError, NotImplementedError):
    pass


class InvalidScale(CFMMError, ValueError):
    pass


class IndexOutOfRange(CFMMError, IndexError):
    pass


class NotInSet(CFMMError, ValueError):
    pass


class InfeasibleFirstTrade(CFMMError, ValueError):
    pass


class RemoveExceedsShare(CFMMError, ValueError):
    pass


class NonPositiveFraction(CFMMError, ValueError):
    pass


class NotConverged(CFMMError):
    """An iterative solver stopped before meeting its tolerance.

    The best iterate found is attached as ``solution`` so callers can still
    inspect it.
    """

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution
