"""Exception hierarchy shared by the library and the CLI."""


class QimgError(Exception):
    """Base class for every error raised by qimg."""


class ValidationError(QimgError, ValueError):
    """An argument violates a documented precondition."""


class CapacityError(ValidationError):
    """Requested register exceeds the simulator's qubit cap."""


class SelectionError(QimgError):
    """Post-selection on a pattern with zero probability."""


class PnmParseError(QimgError, ValueError):
    """Malformed PNM input. ``offset`` is the byte position of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset
