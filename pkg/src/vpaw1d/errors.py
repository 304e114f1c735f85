"""Exception types shared across the package."""


class Vpaw1dError(Exception):
    """Base class for all package-specific errors."""


class RootBracketFailure(Vpaw1dError):
    """A sign change of a secular/jump equation could not be isolated."""


class DegenerateSystem(Vpaw1dError):
    """The eigenfunction coefficient system has unexpected rank at a root."""


class SideRequired(Vpaw1dError):
    """Evaluation at a singular point needs an explicit one-sided flag."""


class IllConditioned(Vpaw1dError):
    """A matching system is too ill-conditioned for the working precision."""


class SingularGram(Vpaw1dError):
    """The projector Gram matrix is numerically singular."""


class OverlapError(Vpaw1dError):
    """Cut-off windows of distinct sites intersect."""


class NotSPD(Vpaw1dError):
    """A matrix required to be symmetric positive definite is not."""


class NoConvergence(Vpaw1dError):
    """An iterative eigenvalue computation failed to converge."""


class NonPositiveValue(Vpaw1dError):
    """Log-log fitting received a value that is not strictly positive."""


class OrderOutOfRange(Vpaw1dError):
    """A derivative order outside the supported range was requested."""


class MeshError(Vpaw1dError):
    """A finite-element mesh cannot accommodate the requested geometry."""
