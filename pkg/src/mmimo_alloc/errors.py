"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a formula."""


class InfeasibleError(RuntimeError):
    """No allocation satisfies the power budgets."""


class ConfigError(ValueError):
    """A configuration key or value is invalid.

    Parameters
    ----------
    key : str
        The offending configuration key.
    message : str
        Which constraint was violated.
    """

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")
