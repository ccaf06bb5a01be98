"""Exception hierarchy shared across the package.

Every error type carries the process exit code the CLI maps it to, so the
command layer stays a thin dispatcher.
"""


class FerromuError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(FerromuError):
    """Bad configuration or input file (missing key, malformed CSV, bad units)."""

    exit_code = 2


class GridMismatchError(ConfigError):
    """Two spectra that must share a frequency grid do not."""


class FeatureAbsentError(FerromuError):
    """A required spectral feature (zero crossing) is not present in the band."""

    exit_code = 3


class CompensationRangeError(FerromuError):
    """Magnitude ratio outside the validity window of the lift-off correction."""

    exit_code = 4


class InversionError(FerromuError):
    """Permeability search failed (no interior minimum, bracket collapse)."""

    exit_code = 5


class NumericalError(FerromuError):
    """Quadrature or optimizer did not converge within its budget.

    `estimate` holds the best value achieved, `error_bound` the estimated
    error, when the failing routine can provide them.
    """

    exit_code = 6

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound
