"""Shared exception and warning types."""


class ShiftLabError(Exception):
    """Base class for all shiftlab domain errors."""


class HorizonExceededError(ShiftLabError):
    """A query exceeded the length up to which an oracle is exact."""


class InvalidSpecError(ShiftLabError):
    """A shift, map, gap-set or potential specification is malformed."""


class NotCodedError(ShiftLabError):
    """The operation needs a coded-shift oracle with an accessible generator."""


class NoCycleError(ShiftLabError):
    """The graph has no cycle, so the requested quantity is undefined."""


class NoComponentError(ShiftLabError):
    """No strongly connected component with an edge exists."""


class NonConvergenceError(ShiftLabError):
    """An iterative solver could not certify the requested tolerance."""


class ReducibleError(ShiftLabError):
    """The graph is not irreducible; pass a single communicating class."""


class ToleranceCollisionError(ShiftLabError):
    """Two interval endpoints are closer than the dedup tolerance but not
    provably equal at the carried precision."""


class FactorizeIncompleteError(ShiftLabError):
    """The decomposition cannot factor the given word."""


class NoConnectorError(ShiftLabError):
    """Some pair of words cannot be glued within the allowed gap size."""


class EmptySelectionError(ShiftLabError):
    """No word satisfied the typical-word selection criteria."""


class TruncationIncompleteWarning(UserWarning):
    """Results were computed on a truncated (incomplete) Markov diagram."""
