"""Exception types raised by msgkit.

Numerical failures (the ones the CLI maps to exit code 2) derive from
:class:`NumericalFailure`; bad inputs derive from :class:`ValueError` as well so
callers can catch them the usual way.
"""


class MsgkitError(Exception):
    """Base class for all msgkit errors."""


class NumericalFailure(MsgkitError):
    """A computation ran but its result cannot be trusted."""


class ConservationViolation(NumericalFailure):
    """The first integral P drifted more than the configured tolerance."""


class NonMonotone(NumericalFailure):
    """A kink profile slope changed sign (drift off the separatrix)."""


class BlowUp(NumericalFailure):
    """A perturbation left the linear regime during time evolution."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class RegimeError(NumericalFailure, ValueError):
    """Pressure lies outside the regime an operation is defined for."""


class DomainError(MsgkitError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class NotAFixedPoint(MsgkitError, ValueError):
    """Field value does not solve sin(phi) + N eps sin(N phi) = 0."""


class CflViolation(MsgkitError, ValueError):
    """Time step too large for the explicit wave-equation update."""
