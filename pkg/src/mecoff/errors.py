"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """An argument is outside the domain a function is defined on."""


class ConstraintViolationError(RuntimeError):
    """A hard resource limit (C1..C5) was exceeded.

    `constraints` names the violated limits, e.g. ("C4",).
    """

    def __init__(self, constraints, message):
        super().__init__(message)
        self.constraints = tuple(constraints)


class DegenerateSignalError(ValueError):
    """A correlation was requested against a zero-variance signal."""


class ConfigError(ValueError):
    """A scenario or sweep configuration field is invalid."""
