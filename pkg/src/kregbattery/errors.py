"""Exception hierarchy shared by every module; CLI exit codes hang off it."""


class KRegError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ValidationError(KRegError, ValueError):
    """Invalid model parameters, configs or operator arguments."""

    exit_code = 1


class DimensionError(ValidationError):
    """Operands act on different numbers of sites."""


class PreconditionError(ValidationError):
    """An operation's stated precondition does not hold (e.g. non-commuting generators)."""


class FormulaNotApplicable(ValidationError):
    """A closed-form law was requested outside its range of validity."""


class ResourceError(KRegError):
    """Requested system size exceeds a hard dense-simulation cap."""

    exit_code = 2


class NumericalError(KRegError, ArithmeticError):
    """A numerical consistency check failed beyond tolerance."""

    exit_code = 1
