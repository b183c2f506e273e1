"""Exception hierarchy.

Every error raised by the library is a ``ValueError`` subclass so callers that only
care about bad input can keep catching ``ValueError``.
"""


class OpdpError(ValueError):
    """Base class for all library errors."""


class NonInvertibleDenominator(OpdpError):
    """A rational with a denominator divisible by p was reduced into F_p."""


class NotAnIndex(OpdpError):
    """A ratio of group orders that should be a subgroup index is not an integer."""


class ArityMismatch(OpdpError):
    pass


class DegreeMismatch(OpdpError):
    pass


class ShapeMismatch(OpdpError):
    pass


class NotASubgroup(OpdpError):
    pass


class NotContained(OpdpError):
    pass


class NotInvariant(OpdpError):
    """A vector expected to be fixed by a group is not."""


class IndexOutOfRange(OpdpError):
    pass


class NotStep(OpdpError):
    """A depth map is not dyadic or not constant on the blocks of its composition."""


class ShapeError(OpdpError):
    pass


class ParseError(OpdpError):
    """Malformed text input (exit code 2 at the command line)."""
