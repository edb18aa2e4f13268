"""Exception types raised by the toolkit."""


class FactorizationError(RuntimeError):
    """Covariance factorization failed beyond the jitter budget."""


class SamplingError(RuntimeError):
    """A rejection sampler exceeded its iteration budget."""


class QuadratureError(RuntimeError):
    """Numerical integration could not reach the requested tolerance."""


class EstimationError(RuntimeError):
    """An ensemble estimator received degenerate input."""


class FitError(RuntimeError):
    """Power-law fitting had too few usable points."""
