"""Exception hierarchy shared by every stage of the pipeline."""


class HyplapError(Exception):
    """Base class for all errors raised by hyplap."""


class InputError(HyplapError, ValueError):
    """Malformed or inconsistent user input (hypergraph, sheaf, flags)."""


class LimitError(HyplapError):
    """A basis would exceed the configured size cap."""

    def __init__(self, what, size, cap):
        self.what = what
        self.size = size
        self.cap = cap
        super().__init__(f"{what}: basis size {size} exceeds cap {cap}")


class FunctorialityError(InputError):
    """Restriction maps of a sheaf do not commute on some square."""

    def __init__(self, square, residual):
        self.square = square
        self.residual = residual
        super().__init__(
            f"functoriality violated on square {square} (residual {residual:.3e})"
        )


class UnsupportedError(HyplapError):
    """A valid request that this implementation does not handle."""
