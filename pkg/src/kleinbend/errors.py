"""Exception types shared across the package."""


class KleinbendError(Exception):
    """Base class for all package errors."""


class FrameMismatch(KleinbendError):
    """Objects from different Lorentz frames were combined."""


class FixesInfinity(KleinbendError):
    """Isometric sphere requested for a transform fixing infinity."""


class Inconclusive(KleinbendError):
    """Classification certificates conflict within tolerance.

    Carries the partial certificate so the caller can decide.
    """

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate or {}


class PlanesIntersect(KleinbendError):
    """No common perpendicular: the planes meet or are tangent."""


class NoCircle(KleinbendError):
    """Two spheres do not intersect, so they define no circle."""


class BallTooLarge(KleinbendError):
    """Word-ball enumeration exceeded the configured element cap."""


class PreconditionFailed(KleinbendError):
    """A combination precondition failed; carries the witness report."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class PairingMismatch(KleinbendError):
    """A face pairing does not map its face onto a listed face."""


class OpenCycle(KleinbendError):
    """An edge cycle did not close within the iteration cap."""


class SearchFailed(KleinbendError):
    """Power search found no exponent within the configured range."""


class NoCrossing(KleinbendError):
    """The pencil never reaches tangency with the target sphere."""


class EndpointMismatch(KleinbendError):
    """Consecutive path stages do not agree at their junction."""


class NoTransition(KleinbendError):
    """No classification change was found along the sampled path."""


class AngleUnreachable(KleinbendError):
    """The pencil cannot realize the requested intersection angle."""


class EmptyCloud(KleinbendError):
    """Rendering or export was requested for an empty point cloud."""


class SceneError(KleinbendError):
    """Scene file violates the schema or references unknown names."""

    def __init__(self, message, pointer=None):
        super().__init__(message if pointer is None else f"{message} (at {pointer})")
        self.pointer = pointer
