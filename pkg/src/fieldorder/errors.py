"""Exception types shared across the package."""


class FieldOrderError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(FieldOrderError, ValueError):
    """Operands have incompatible dimensions."""


class DomainViolationError(FieldOrderError, ValueError):
    """A point lies outside the domain it is required to belong to."""


class InvariantBreachError(FieldOrderError, AssertionError):
    """A cross-check that must hold by theorem failed.

    Raised by classify_point when an inclusion chain between verdicts
    (ess implies minimal implies critical, local minimum implies critical)
    breaks on identical probe sets.  This is never swallowed: the CLI maps
    it to exit code 4.
    """
