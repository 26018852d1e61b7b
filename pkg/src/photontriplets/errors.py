"""Exception types shared by the package.

The CLI maps these onto exit codes: configuration problems exit 1,
numerical problems exit 2.
"""


class TripletError(Exception):
    """Base class for every error raised by photontriplets."""


class ConfigError(TripletError, ValueError):
    """Missing, malformed or physically invalid configuration."""

    def __init__(self, message, missing=()):
        self.missing = tuple(missing)
        if self.missing:
            message = f"{message}: {', '.join(self.missing)}"
        super().__init__(message)


class PhaseMismatchError(ConfigError):
    pass


class NumericalError(TripletError, ArithmeticError):
    """Something went wrong in a computation rather than in the inputs' structure."""


class DomainError(NumericalError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class NumericalOverflowError(NumericalError, OverflowError):
    def __init__(self, z):
        self.z = z
        super().__init__(f"non-finite field amplitude at z = {z:.6g} m")


class NoFitError(NumericalError):
    pass


class DegenerateRangeError(NumericalError, ValueError):
    pass


class OutputError(TripletError, OSError):
    """Reading or writing a data/report file failed; message names the path."""
