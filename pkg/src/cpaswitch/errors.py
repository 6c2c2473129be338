"""Exception hierarchy.

Configuration problems and numerical failures are kept apart because the
command line maps them to different exit codes.
"""


class CpaSwitchError(Exception):
    """Base class for every error raised by the package."""


class InvalidInputError(CpaSwitchError, ValueError):
    """A parameter, grid or series violates its documented constraints."""


class NumericalError(CpaSwitchError, ArithmeticError):
    """A computation could not produce a finite, meaningful result."""


class SingularityError(NumericalError):
    def __init__(self, term: str, detail: str = ""):
        self.term = term
        msg = f"denominator of {term} vanishes"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class UndefinedEfficiencyError(NumericalError):
    """The reference intensity in an efficiency ratio is (numerically) zero."""


class NoPeakError(NumericalError):
    """No on-state maximum could be found near the requested channel."""


class BandwidthUndefinedError(NumericalError):
    """The half level is not crossed on both sides of the switching peak."""


class IntegrationFailure(NumericalError):
    """The time integrator's step size underflowed."""


class ConfigError(CpaSwitchError):
    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.message = message
        self.line = line
        self.field = field
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if field is not None:
            prefix.append(field)
        super().__init__(f"{': '.join(prefix)}: {message}" if prefix else message)
