"""Exception types shared across the package."""


class DomainError(ValueError):
    """A parameter lies outside the range where a formula or bound applies."""


class DivergentMeasureError(DomainError):
    """The requested Cauchy measure is not normalizable (alpha <= n/2)."""


class InfiniteMomentError(DomainError):
    """The requested moment does not exist."""


class VarianceGuardError(DomainError):
    """A Monte Carlo estimator would have infinite variance."""


class ConfigurationError(ValueError):
    """Malformed function spec, grid, or experiment config."""


class ShapeError(ValueError):
    """Point dimension does not match the measure or function."""


class PoisonedSampleError(FloatingPointError):
    """An integrand returned a non-finite value."""


class TruncationError(RuntimeError):
    """A grid density has too much mass near the boundary of its box."""
