"""Exception types shared across the package."""


class LQRLError(Exception):
    """Base class for all package errors."""


class ConfigError(LQRLError, ValueError):
    """Invalid or unparseable experiment configuration."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class DivergenceError(LQRLError, ArithmeticError):
    """A simulation or training run produced non-finite or runaway values."""

    def __init__(self, message: str, step: int | None = None, coordinate: int | None = None):
        super().__init__(message)
        self.step = step
        self.coordinate = coordinate
        # rows logged before the failure, when a simulator had any
        self.trajectory = None
