"""Exception hierarchy shared by every module."""


class BlockforgeError(Exception):
    """Base class for all package errors."""


class ValidationError(BlockforgeError, ValueError):
    """Malformed input: bad word, mismatched lengths, unknown label."""


class ResourceLimitError(BlockforgeError):
    """A configured enumeration or search bound was exceeded."""


class GeometryError(BlockforgeError):
    """A geometric operation produced an inconsistent placement."""

    def __init__(self, message, pairs=()):
        super().__init__(message)
        self.pairs = tuple(pairs)


class NotRealizableError(BlockforgeError):
    """A post-condition on a language or ground-state manifold failed."""
