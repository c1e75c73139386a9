"""Exception types raised across the package."""


class PairpotError(Exception):
    """Base class for package errors."""


class ConfigError(PairpotError, ValueError):
    """Invalid configuration or argument combination."""


class DegenerateEstimateError(PairpotError):
    """An estimator normalizer vanished (empty region, saturated window)."""


class UnsupportedModelError(PairpotError, TypeError):
    """Operation requested on a model kind that does not support it."""


class ResourceError(PairpotError):
    """A request exceeded a sanity cap on memory or point count."""
