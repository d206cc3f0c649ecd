"""Exception types raised across the package."""


class DeltaPrimeError(Exception):
    """Base class for all package errors."""


class ResonantSpectralPoint(DeltaPrimeError, ValueError):
    """-kappa**2 sits at (or numerically next to) the delta-prime eigenvalue."""


class DegenerateCoupling(DeltaPrimeError, ValueError):
    """A scaled coupling constant vanishes (spacing a == beta/2)."""


class SingularU(DeltaPrimeError, ZeroDivisionError):
    """The outer-coupling parameter u = 2*beta*kappa*a/(2a - beta) has a pole."""


class SingularGamma(DeltaPrimeError, ArithmeticError):
    """The Krein matrix is singular: -kappa**2 is an eigenvalue of the array operator."""


class ThresholdNotFound(DeltaPrimeError, ValueError):
    """No admissible spacing was found on the search grid."""


class DivisionByZeroSeries(DeltaPrimeError, ZeroDivisionError):
    """Series divisor vanishes identically to the retained order."""


class ValuationMismatch(DeltaPrimeError, ArithmeticError):
    """Series quotient would acquire a pole that was not allowed."""


class UnknownExpansionId(DeltaPrimeError, KeyError):
    pass


class NormalizationFailure(DeltaPrimeError, ValueError):
    """Potential shape does not integrate to one."""


class GridTooCoarse(DeltaPrimeError, ValueError):
    pass


class EigenvalueHit(DeltaPrimeError, ArithmeticError):
    """The two decaying solutions are linearly dependent (vanishing Wronskian)."""


class OverflowGuard(DeltaPrimeError, OverflowError):
    pass


class PowerIterationStall(DeltaPrimeError, RuntimeError):
    pass


class RegimeViolation(DeltaPrimeError, ValueError):
    """Parameters lie outside the regime where a convergence statement applies.

    ``failed`` lists the violated preconditions as human readable strings.
    """

    def __init__(self, failed):
        self.failed = list(failed)
        super().__init__("; ".join(self.failed))
