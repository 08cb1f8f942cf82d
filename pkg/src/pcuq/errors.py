"""Exception types shared across the package."""


class PcuqError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(PcuqError):
    """A distribution or configuration parameter violates its constraints."""


class SupportError(PcuqError):
    """A physical-space value lies outside a marginal's support."""


class DimensionMismatchError(PcuqError):
    """An array has the wrong shape for the requested operation."""


class DesignSizeError(PcuqError):
    """A requested design or basis would exceed the configured size cap."""


class UnderdeterminedError(PcuqError):
    """Fewer samples than coefficients; least squares is not well posed."""


class MissingWeightsError(PcuqError):
    """Projection requires a quadrature design with weights."""


class ZeroVarianceError(PcuqError):
    """Sensitivity indices are undefined for a zero-variance model."""


class DegenerateDataError(PcuqError):
    """Training data is unusable (duplicate inputs)."""


class NotPositiveDefiniteError(PcuqError):
    """Kernel matrix factorization failed even at maximum jitter."""


class GridFormatError(PcuqError):
    """A surrogate grid file is not a regular tensor grid."""


class ConfigError(PcuqError):
    """A study configuration is invalid; the message names the offending key."""


class PipelineError(PcuqError):
    """A pipeline stage failed; carries the stage name."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"stage '{stage}': {message}")
        self.stage = stage
