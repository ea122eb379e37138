"""Shared exception types."""


class WpaError(Exception):
    """Base class for all errors raised by this package."""


class SpecError(WpaError):
    """Malformed group / sequence / function spec string."""


class DegreeMismatchError(WpaError):
    """Permutations of different degrees were combined."""


class CapExceededError(WpaError):
    """An enumeration cap (order, lattice size, generator search) was passed."""


class DegreeCapError(WpaError):
    """A requested permutation degree exceeds the representable-degree cap."""


class IndeterminateError(WpaError):
    """A certified comparison could not be decided at the available precision."""
