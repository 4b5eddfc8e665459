"""Exception types shared across warplab modules."""


class WarpLabError(Exception):
    """Base class for all warplab errors."""


class DomainError(WarpLabError, ValueError):
    """A point, radius, or parameter is outside the usable domain."""


class HarmonicityError(WarpLabError, ValueError):
    """An operation that assumes a (sub)harmonic input was given one that is not."""


class QuadratureError(WarpLabError, RuntimeError):
    """Adaptive quadrature failed to converge or met an invalid integrand."""


class SolverError(WarpLabError, RuntimeError):
    """A linear solve did not meet its residual contract."""


class PreconditionError(WarpLabError, ValueError):
    """A diagnostic was invoked on data that fails its stated precondition."""


class CertificateError(WarpLabError, RuntimeError):
    """A comparison certificate required by an experiment did not hold."""


class ConfigError(WarpLabError, ValueError):
    """An experiment configuration is malformed or violates a precondition."""
