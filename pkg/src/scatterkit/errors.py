"""Exception types shared across the library.

Every failure mode named in a module contract gets its own class so callers
(and the CLI exit-code mapping) can dispatch without string matching.
"""


class ScatterKitError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(ScatterKitError):
    """Vector or matrix sizes do not agree with the ambient rank."""


class OrderMismatch(ScatterKitError):
    """Two truncated series of different orders were combined."""


class ConstraintConflict(ScatterKitError):
    """A generic point was requested on a hyperplane that must also be avoided."""


class UnsupportedRank(ScatterKitError):
    """The operation is only implemented for rank-2 seeds or fans."""


class NonTransversalPath(ScatterKitError):
    """A path endpoint lies on a wall, or two crossings coincide."""


class NonGenericEndpoint(ScatterKitError):
    """A broken-line endpoint hit a wall, a joint, or a relative boundary."""


class InexactDivision(ScatterKitError):
    """Laurent-polynomial division left a remainder; signals an internal bug."""


class InconsistentFan(ScatterKitError):
    """Kink equations of a piecewise-linear function do not close up."""


class NonUnitConstantTerm(ScatterKitError):
    """A series without unit constant term was inverted or raised to a negative power."""


class ParseError(ScatterKitError):
    """A text input file does not match its grammar."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
