"""Exception hierarchy."""


class HeavyMAError(Exception):
    pass


class DomainError(HeavyMAError, ValueError):
    """An argument lies outside the domain of the operation."""


class ParameterError(HeavyMAError, ValueError):
    """A tuning parameter (tolerance, threshold, count) is invalid."""


class UnsupportedConfiguration(HeavyMAError, ValueError):
    """The requested combination of model parameters is not supported."""


class DegenerateCoefficients(HeavyMAError, ValueError):
    """The coefficient sum is zero, so partial-sum ratios are undefined."""


class ConfigError(HeavyMAError, ValueError):
    """Experiment configuration failed validation.

    ``field`` names the offending entry using dotted notation, e.g.
    ``tail.alpha``.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
