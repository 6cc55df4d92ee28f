"""
Error types shared by every module.
Verifiers raise InvariantViolation; argument guards raise PreconditionError.
"""


class SpectraError(Exception):
    """Base class for all errors raised by this package."""


class PreconditionError(SpectraError, ValueError):
    pass


class DimensionError(PreconditionError):
    pass


class AlphabetError(PreconditionError):
    pass


class ConfigError(SpectraError):
    pass


class ConditioningError(SpectraError):
    pass


class ConvergenceError(SpectraError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NullspaceError(SpectraError):
    def __init__(self, message, dimension=None):
        super().__init__(message)
        self.dimension = dimension


class RankDeficiencyError(SpectraError):
    pass


class InvariantViolation(SpectraError, AssertionError):
    """
    A verified property does not hold.
    `check` names the property, `index` locates the first offender (if any)
    and `values` carries the measured quantities.
    """

    def __init__(self, check, message, index=None, values=None):
        super().__init__(f"{check}: {message}")
        self.check = check
        self.index = index
        self.values = dict(values or {})
