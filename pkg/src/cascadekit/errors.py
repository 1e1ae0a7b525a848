"""Exception types shared across the package."""

from __future__ import annotations


class CascadeKitError(Exception):
    """Base class for every error raised by cascadekit."""


class IngestionError(CascadeKitError):
    """Malformed or inconsistent input data (CSV rows, duplicate votes, unknown nodes)."""


class StreamOrderError(CascadeKitError):
    """A streamed activation arrived with a timestamp earlier than one already accepted."""

    def __init__(self, node_id: int, timestamp: float, last_timestamp: float) -> None:
        self.node_id = node_id
        self.timestamp = timestamp
        self.last_timestamp = last_timestamp
        super().__init__(
            f"activation of node {node_id} at t={timestamp} arrived after "
            f"t={last_timestamp} was already processed"
        )


class EnumerationBoundError(CascadeKitError):
    """A brute-force oracle was asked to enumerate a graph above its size bound."""


class ReconstructionError(CascadeKitError):
    """No consistent parent decomposition exists for a node during reconstruction."""

    def __init__(self, label: int, message: str) -> None:
        self.label = label
        super().__init__(f"label {label}: {message}")


class CapabilityError(CascadeKitError):
    """An operation was requested in a mode that cannot support it."""


class FitError(CascadeKitError):
    """Base class for distribution-fitting failures."""


class DegenerateSampleError(FitError):
    """The sample has too little variation to identify the requested family."""


class ConvergenceError(FitError):
    """An iterative fit exhausted its budget; carries the last iterate when available."""

    def __init__(self, message: str, last=None) -> None:
        self.last = last
        super().__init__(message)


class ParameterDomainError(FitError):
    """Distribution parameters outside their valid domain."""
