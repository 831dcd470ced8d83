"""Error taxonomy.

Two families matter operationally: configuration problems (CLI exit code 2)
and numeric gate failures (CLI exit code 3), i.e. cases where a run would
produce numbers that cannot be trusted and must abort rather than report.
"""


class OccutimeError(Exception):
    """Base class for all package errors."""


class ParameterError(OccutimeError, ValueError):
    """Invalid parameter passed to a simulator, estimator, or builder."""


class AlignmentError(OccutimeError, ValueError):
    """Requested skeleton size does not divide the fine grid; never interpolate."""


class SimulationError(OccutimeError):
    """Non-finite values produced while stepping a path."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class CapabilityError(OccutimeError):
    """Operation requested on a function that does not support it."""


class ModelError(OccutimeError):
    """Operation called for a process model it is not valid for."""


class DegenerateVarianceError(OccutimeError):
    """Variance estimate at or below the degeneracy floor; sample excluded."""


class NormDivergenceError(OccutimeError):
    """Norm integral still growing under truncation doubling; no finite value."""


class CoverageError(OccutimeError):
    """Parameters fall outside the hypotheses of every cataloged rate."""


class FitError(OccutimeError, ValueError):
    """Rate fit impossible (too few points or nonpositive errors)."""


class ConfigError(OccutimeError, ValueError):
    """Invalid or unknown configuration content.  CLI exit code 2."""


class NumericGateError(OccutimeError):
    """A numeric gate failed; results would be untrustworthy.  CLI exit code 3."""


class NumericError(NumericGateError):
    """Numerical procedure failed outright (e.g. no valid sampler decomposition)."""


class OracleResolutionError(NumericGateError):
    """Oracle resolution or stability check failed; error measurements unsafe."""


class ResolutionError(NumericGateError):
    """Grid or truncation too coarse for the requested accuracy."""
