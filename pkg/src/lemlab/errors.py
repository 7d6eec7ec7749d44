"""Exception types shared across the toolkit."""


class LemlabError(Exception):
    """Base class for all toolkit errors."""


class NotMonic(LemlabError):
    """An operation that requires a monic polynomial got a non-monic one."""


class NonConvergence(LemlabError):
    """The root finder hit its iteration cap without meeting the residual tolerance."""


class BudgetTooSmall(LemlabError):
    """A requested accuracy is unattainable within the sampling budget."""


class EmptyRegion(LemlabError):
    """A region with no points where a nonempty one is required."""


class DegenerateBoundary(LemlabError):
    """Boundary sampling produced too few candidate points."""


class ResolutionTooCoarse(LemlabError):
    """Pixelization resolution is too coarse for the region's extent."""


class ThinPlate(LemlabError):
    """The inner plate has no cells at the requested grid resolution."""


class SolveFailure(LemlabError):
    """The linear solver did not converge."""


class FormatError(LemlabError):
    """A text input (complex number, polynomial, region file) failed to parse."""
