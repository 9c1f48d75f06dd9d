"""Exception types shared across the package."""


class PcselectError(Exception):
    """Base class for every error raised by this package."""


class DataError(PcselectError):
    """Input data violates a contract (shape, finiteness, file format)."""


class ModelFitError(PcselectError):
    """Model calibration or evaluation failed (bad component count,
    degenerate spectrum, non-positive-definite covariance)."""


class ConfigError(PcselectError):
    """Invalid configuration file or option combination."""
