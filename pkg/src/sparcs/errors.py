"""Exception types shared across the package.

Every error raised by a public operation derives from SparcsError so callers
can catch the whole family at once.  The CLI maps SparcsError (and config
problems in particular) to its documented exit codes.
"""


class SparcsError(Exception):
    """Base class for all package errors."""


class DimensionError(SparcsError):
    """Operands have incompatible or unsupported shapes.

    The message always names both offending shapes.
    """


class DegeneracyError(SparcsError):
    """Numerically rank-deficient input where full rank is required."""


class CapacityError(SparcsError):
    """Requested size exceeds a documented exact-arithmetic bound."""


class StructuralError(SparcsError):
    """A model transformation would produce a structurally invalid network."""


class ConsistencyError(SparcsError):
    """Two objects that must describe the same model disagree."""


class TrainingDivergedError(SparcsError):
    """Loss became non-finite; message carries epoch and batch indices."""


class ParseError(SparcsError):
    """Malformed external file; message carries the line number."""


class ConfigError(SparcsError):
    """Invalid or unknown experiment configuration entry."""
