"""Exception hierarchy shared by all modules."""


class SobolevError(Exception):
    """Base class for every error raised by the package."""


class ArgumentError(SobolevError, ValueError):
    """Malformed or inconsistent arguments (dimensions, empty ranges, ...)."""


class DomainError(SobolevError, ValueError):
    """A point or parameter lies where the operation is undefined."""


class PreconditionError(SobolevError, ValueError):
    """An operation was called outside its validity range."""


class PrecisionError(SobolevError, ArithmeticError):
    """The working precision cannot resolve the requested quantity."""


class UnsupportedError(SobolevError):
    """The input is valid but the requested case is not handled."""


class DecompositionError(SobolevError):
    """Zero classification does not match the asymptotic regime."""


class InternalConsistencyError(SobolevError, RuntimeError):
    """An exact post-condition failed. Always a bug."""
