"""Exception hierarchy shared by all spectral_lab modules."""


class SpectralLabError(Exception):
    """Base class for every error raised by this package."""


class InvalidSpec(SpectralLabError, ValueError):
    """A potential or scenario description violates its invariants."""


class RationalTheta(InvalidSpec):
    """A rotation number was supplied as (or expands as) a rational number."""


class PrecisionUndecidable(SpectralLabError, ArithmeticError):
    """The certified error band straddles a decision boundary."""


class PrecisionExhausted(PrecisionUndecidable):
    """A continued-fraction interval straddles an integer before k terms."""


class AlphaOutOfRange(SpectralLabError, ValueError):
    pass


class OrderViolation(SpectralLabError, ValueError):
    """Exponents given out of order (need 0 < gamma1 <= gamma2)."""


class DomainMismatch(SpectralLabError, ValueError):
    """Negative site requested for a half-line potential."""


class SiteBudgetExceeded(SpectralLabError, ValueError):
    pass


class NumericOverflow(SpectralLabError, OverflowError):
    pass


class InsufficientCheckpoints(SpectralLabError, ValueError):
    pass


class NonPositiveSlope(SpectralLabError, ValueError):
    """Every profile in a fit has a nonpositive growth slope."""


class ScheduleMismatch(SpectralLabError, ValueError):
    """Two traces or profiles do not share a checkpoint schedule."""


class EmptyWindow(SpectralLabError, ValueError):
    """No admissible window exponent: p <= 3*gamma2 - gamma1."""


class CutoffTooSmall(SpectralLabError, RuntimeError):
    def __init__(self, message, shift=None):
        super().__init__(message)
        self.shift = shift


class PremiseViolation(SpectralLabError, ValueError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
