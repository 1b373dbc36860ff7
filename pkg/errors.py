"""
Error Types
Exception hierarchy shared by the library modules and the CLI.
"""

from typing import Dict, Optional, Sequence


class IsoEdgeError(Exception):
    """Base class for every error raised by this package."""


class InputFormatError(IsoEdgeError):
    """Malformed user input: form files, rationals, manifests, CLI values."""


class NotPositiveDefiniteError(IsoEdgeError):
    """
    A form failed the positive definiteness (or semidefiniteness) test.

    Args:
        message (str): Human readable description
        pivot (int): 0-based index of the first non-positive LDL^T pivot,
            or None when the failure is not tied to a pivot
    """

    def __init__(self, message: str, pivot: Optional[int] = None):
        super().__init__(message)
        self.pivot = pivot


class DegenerateFormError(IsoEdgeError):
    """
    A positive definite form is not primitive.

    ``degenerate`` maps each parity mask whose closest-vector set has more
    than two points to the size of that set.
    """

    def __init__(self, degenerate: Dict[int, int]):
        classes = ", ".join(f"{mask}:{count}" for mask, count in sorted(degenerate.items()))
        super().__init__(f"form is not primitive, degenerate classes {{{classes}}}")
        self.degenerate = dict(degenerate)


class EmptyInteriorError(IsoEdgeError):
    """The cone is {0}; there is no interior point to pick."""


class FlipError(IsoEdgeError):
    """A flip was requested on a non-facet, or produced an invalid configuration."""


class EquivalenceError(IsoEdgeError):
    """Vector system rejected by the equivalence engine (e.g. not spanning)."""


class CensusError(IsoEdgeError):
    """
    A census or checkpoint cannot be used for the requested computation.

    Args:
        message (str): Description
        missing_dims (Sequence[int]): Dimensions absent from the census
    """

    def __init__(self, message: str, missing_dims: Sequence[int] = ()):
        super().__init__(message)
        self.missing_dims = tuple(missing_dims)
