"""Exception types shared across the library."""


class PhigeoError(Exception):
    """Base class for all library errors."""


class DomainError(PhigeoError, ValueError):
    """Input outside the mathematical domain of an operation."""


class RangeError(PhigeoError, ValueError):
    """Requested value lies beyond the range of the deformed logarithm."""


class BoundaryError(PhigeoError, ValueError):
    """Operation requires an interior probability vector."""


class BracketError(PhigeoError, ValueError):
    """Root finding called without a sign change on the bracket."""


class ConvergenceError(PhigeoError, RuntimeError):
    """Iteration budget exhausted before reaching the tolerance."""


class DivergentIntegralError(PhigeoError, ArithmeticError):
    """The requested integral does not converge."""


class PoleError(PhigeoError, ValueError):
    """The Tsallis-Souza map 1 + nu*log(x) hits zero on the working range."""


class BranchError(PhigeoError, ValueError):
    """Closed form requested on a degenerate (c,d) parameter branch."""


class InfeasibleTargetError(PhigeoError, ValueError):
    """Moment targets lie outside the convex hull of the configurations."""


class NoNormalizationError(PhigeoError, ValueError):
    """No normalizer makes the deformed exponential sum to one."""
