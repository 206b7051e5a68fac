"""Exception hierarchy shared by all modules."""


class TauwardError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(TauwardError, ValueError):
    """An input violates a type invariant (message names the invariant)."""


class NonConvergence(TauwardError):
    """An iterative solver failed to reach its residual target."""


class InteriorPoint(TauwardError, ValueError):
    """A point required to lie in the exterior domain does not."""


class NearBoundary(TauwardError, ValueError):
    """A point lies within one grid spacing of the contour."""


class OriginOutside(TauwardError, ValueError):
    """The origin is not inside the contour."""


class UnivalenceFailure(TauwardError):
    """The exterior map is not (numerically) univalent."""


class UnivalenceLost(UnivalenceFailure):
    """A Newton iterate left the set of univalent maps."""


class NonpositiveArea(UnivalenceFailure):
    """Area from the coefficient formula is not positive."""


class CoincidentPoints(TauwardError, ValueError):
    """Kernel evaluated on its diagonal."""


class TailTooLarge(TauwardError):
    """A truncated Laurent series has a last term above tolerance."""


class DegenerateImOmega(TauwardError, ValueError):
    """Im(Omega) is (nearly) singular."""


class WindowTooSmall(TauwardError, ValueError):
    """Lattice window smaller than the tail bound requires."""


class OnThetaDivisor(TauwardError, ValueError):
    """theta[xi](0|Omega) vanishes numerically."""


class LatticePoint(TauwardError, ValueError):
    """Torus Green's function evaluated at a lattice point."""


class VerificationError(TauwardError, AssertionError):
    """An internal two-route consistency assertion failed."""
