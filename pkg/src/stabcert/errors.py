"""Exception types raised across the package."""


class StabCertError(Exception):
    """Base class for all package errors."""


class SingularBasis(StabCertError):
    pass


class TooLarge(StabCertError):
    pass


class DependentRows(StabCertError):
    pass


class DimensionMismatch(StabCertError):
    pass


class UnknownGate(StabCertError):
    pass


class CircuitParseError(StabCertError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class FidelityMismatch(StabCertError):
    """A family construction would not produce the requested fidelity."""


class NotABadState(StabCertError):
    """The state has fidelity above ``1 - eps`` so it is not a bad state."""


class InfeasibleGap(StabCertError):
    """The parameter chain cannot be satisfied with strict inequalities."""


class BudgetTooTight(StabCertError):
    pass


class FactViolation(AssertionError):
    """A basis element fell below ``2F - 1``; this can only be a bug."""
