"""Exception hierarchy shared by all ddewave modules."""


class DdeWaveError(Exception):
    """Base class for all errors raised by ddewave."""


class ValidationError(DdeWaveError):
    """A model hypothesis or input invariant failed a numerical check."""


class SingularMatrixError(DdeWaveError):
    """A linear system was singular to working precision."""


class DimensionCapError(DdeWaveError):
    """A dense matrix exceeded the configured dimension cap."""


class IntegrationError(DdeWaveError):
    """Adaptive ODE integration failed (step underflow or blow-up)."""


class ContourError(DdeWaveError):
    """A contour integral could not be evaluated or did not round to an integer."""


class ClusterResolutionError(DdeWaveError):
    """Recursive subdivision failed to isolate a root cluster."""


class DiscrepancyError(DdeWaveError):
    """Two independent pipelines disagreed beyond tolerance."""


class ConfigError(DdeWaveError):
    """A problem configuration file failed schema validation."""
