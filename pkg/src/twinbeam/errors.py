"""Exception and warning types raised by twinbeam."""


class TwinBeamError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(TwinBeamError, ValueError):
    """Invalid scenario, material file or interaction configuration."""


class OutOfRange(TwinBeamError, ValueError):
    """A wavelength falls outside the validity range of a dispersion model."""


class NumericalInstability(TwinBeamError, ArithmeticError):
    """Finite-difference estimates failed to agree."""


class NoSolution(TwinBeamError, ValueError):
    """The quasi-phase-matching equation has no positive poling period."""


class AboveThreshold(TwinBeamError, ValueError):
    """Counter-propagating gain at or above the oscillation threshold g = pi/2."""


class InvalidCoeffs(TwinBeamError, ValueError):
    """Bogoliubov coefficients violate the unitarity conditions."""


class NoCrossing(TwinBeamError, ValueError):
    """A squeezing spectrum never crosses the shot-noise level."""


class QuadratureFailure(TwinBeamError, ArithmeticError):
    """Adaptive quadrature could not reach the requested tolerance."""


class BadBracket(TwinBeamError, ValueError):
    """Root bracket endpoints do not have opposite signs."""


class NearThresholdWarning(UserWarning):
    """Gain within 1e-3 of threshold; quadrature results lose accuracy."""
