"""Exception types shared across the package."""

import threading


class ConsistencyError(RuntimeError):
    """An internal identity that must hold exactly was violated."""

    def __init__(self, message: str, discrepancy=None):
        super().__init__(message)
        self.discrepancy = discrepancy


class Cancelled(RuntimeError):
    """Raised when a long computation observes a set cancellation event."""


def check_cancel(cancel: "threading.Event | None") -> None:
    if cancel is not None and cancel.is_set():
        raise Cancelled("computation cancelled")
