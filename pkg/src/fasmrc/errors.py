"""Exception hierarchy for fasmrc.

Every error raised by this package derives from :class:`FasmrcError`, so
callers (notably the CLI sweep runner) can record a failure per data point
without aborting a whole experiment.
"""


class FasmrcError(Exception):
    """Base class for all fasmrc errors."""


class NumericalInstability(FasmrcError):
    """A computed quantity violates a known mathematical constraint.

    Signals a defect in the numerics (cancellation, truncation, a special
    function off its accuracy contract), not a user error.
    """


class DegenerateCorrelation(FasmrcError):
    """The correlation factor equals 1: port SNRs collapse to a point mass
    and the analytical densities are undefined."""


class TruncationFailure(FasmrcError):
    """A truncated series could not meet its tail tolerance."""


class TermExplosion(FasmrcError):
    """A sparse-polynomial product exceeded the configured term cap."""


class UnsupportedConfiguration(FasmrcError):
    """The requested configuration is outside the analytic path's domain
    (e.g. K = M, where no idle port remains to anchor the selection)."""


class OracleStarvation(FasmrcError):
    """A conditional Monte-Carlo oracle cannot produce usable samples
    (rejection acceptance below threshold)."""


class QuadratureNonconvergence(FasmrcError):
    """Adaptive quadrature failed to reach its error target."""
