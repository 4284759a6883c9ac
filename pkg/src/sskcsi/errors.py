"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


class DomainError(ValueError):
    """Argument outside the domain where a closed form is defined."""


class AccuracyError(RuntimeError):
    """A numerical procedure could not reach the requested accuracy.

    The best estimate obtained is kept in ``estimate`` when one exists.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate
