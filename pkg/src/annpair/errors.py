"""Exception types shared across the package."""


class AnnpairError(Exception):
    """Base class for all library-specific failures."""


class GapCheckError(AnnpairError):
    """A set intersects one of the required periodic gap translates."""


class CertificateError(AnnpairError):
    """A numerically verified bound came out worse than the analytic one."""


class OscillationError(AnnpairError):
    """Quadrature step too coarse for the integrand's top frequency."""


class ScaleSearchError(AnnpairError):
    """Doubling search for the scale parameter exceeded its cap."""


class TableRangeError(AnnpairError):
    """Strict evaluation requested beyond the tabulated transform range."""


class ConvergenceError(AnnpairError):
    """A refinement check did not converge to the requested tolerance."""


class IdentityError(AnnpairError):
    """An exact analytic identity was violated beyond tolerance."""


class AvoidanceError(AnnpairError):
    """An emitted lattice point landed inside the excluded set."""


class InsufficientAlphasError(AnnpairError):
    """Not enough shift parameters passed the block audit."""
