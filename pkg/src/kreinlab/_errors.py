"""Exception roots shared by every krein-lab module."""

from __future__ import annotations


class KreinLabError(Exception):
    """Base class of all errors raised by the lab."""


class DomainError(KreinLabError, ValueError):
    """A precondition of an operation does not hold."""


class ResolutionError(KreinLabError, ArithmeticError):
    """A numerical procedure failed to reach the requested accuracy."""


class PrecisionOverflowError(ResolutionError):
    """A value overflowed the working precision."""

    def __init__(self, what: str) -> None:
        """
        Initialize the exception.

        Args:
            what: Description of the quantity that overflowed.
        """

        super().__init__(f"overflow of the working precision while computing {what}")


class BracketCountError(ResolutionError):
    """Root bracketing did not stabilize under grid refinement."""

    def __init__(self, lo: float, hi: float, counts: list[int]) -> None:
        """
        Initialize the exception.

        Args:
            lo: Lower end of the scanned interval.
            hi: Upper end of the scanned interval.
            counts: Sign-change counts observed at successive refinements.
        """

        super().__init__(
            f"unstable bracket count on [{lo:.6g}, {hi:.6g}]: counts {counts}"
        )
        self.counts: list[int] = counts


class QuadratureError(ResolutionError):
    """Adaptive quadrature did not converge."""

    def __init__(self, achieved: float, target: float) -> None:
        """
        Initialize the exception.

        Args:
            achieved: The achieved error estimate.
            target: The requested tolerance.
        """

        super().__init__(
            f"quadrature did not converge: achieved {achieved:.3e}, target {target:.3e}"
        )
        self.achieved: float = achieved


class StiffnessError(ResolutionError):
    """The ODE stepper could not advance."""

    def __init__(self, message: str) -> None:
        """
        Initialize the exception.

        Args:
            message: The integrator's failure message.
        """

        super().__init__(f"step-size underflow while shooting: {message}")
