"""Exception types shared across the package."""


class JJLineError(Exception):
    """Base class for all package-specific errors."""


class SingularAtResonance(JJLineError):
    """Transfer matrix requested at (or too close to) a junction resonance.

    At omega = omega_p the junction is a perfect mirror (t = 0) and the
    transfer-matrix entries 1/t diverge. Work with (r, t) directly there.
    """


class NoNullSpace(JJLineError):
    """Matrix has no singular value below the requested tolerance."""


class InsideGap(JJLineError):
    """Group velocity requested for an evanescent (band-gap) frequency."""


class EmptyContour(JJLineError):
    """No isofrequency contour exists at the requested frequency."""


class BandEdge(JJLineError):
    """Implicit-derivative denominator vanished (band extremum)."""


class TotalReflection(JJLineError):
    """No propagating mode in the crystal matches the incident wave."""


class PositionInsideScatterer(JJLineError):
    """Green function evaluation point lies inside the scattering region."""


class DegenerateSteadyState(JJLineError):
    """Liouvillian null space is (numerically) more than one-dimensional."""


class ModelInvariantError(JJLineError):
    """A physical-model invariant was violated (e.g. dissipator positivity)."""


class ConfigError(JJLineError):
    """Invalid or unknown configuration input."""
