"""Exception types shared across the package."""


class GallaiError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(GallaiError, ValueError):
    """A parameter lies outside its documented domain."""


class InvalidInputError(GallaiError, ValueError):
    """An input object violates a structural precondition."""


class ResourceLimitError(GallaiError, RuntimeError):
    """A configured enumeration budget was exceeded.

    ``partial`` may carry whatever partial result was assembled before the
    budget ran out; ``nodes_visited`` reports search effort when known.
    """

    def __init__(self, message: str, *, partial=None, nodes_visited: int | None = None):
        super().__init__(message)
        self.partial = partial
        self.nodes_visited = nodes_visited


class ParseError(GallaiError, ValueError):
    """Malformed external input; carries the offending position."""

    def __init__(self, message: str, *, offset: int | None = None, line: int | None = None):
        detail = message
        if line is not None:
            detail = f"{message} (line {line})"
        elif offset is not None:
            detail = f"{message} (byte {offset})"
        super().__init__(detail)
        self.offset = offset
        self.line = line
