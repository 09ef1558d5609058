"""Exception types shared across the package."""


class UnsupportedOrderError(ValueError):
    """Polynomial or series order above the supported stability cap."""


class DivergentIntegralError(ValueError):
    """Gaussian moment requested with a non-positive quadratic coefficient."""


class NumericFailure(RuntimeError):
    """A numeric routine could not reach its accuracy target.

    ``estimate`` carries the achieved error estimate when one is available.
    """

    def __init__(self, message: str, estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate


class IntegrandDefinitionError(RuntimeError):
    """A quantity that must be real came back with a large imaginary part."""


class DegenerateMatrixError(ValueError):
    """Coherence matrix with non-positive trace; polarization is undefined."""


class RealizabilityError(ValueError):
    """Source correlations violate |gamma_xy|^2 <= gamma_xx * gamma_yy."""


class ConfigError(ValueError):
    """Scenario configuration failed to parse or validate."""
