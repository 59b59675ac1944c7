"""
Error types for Forested Links.

Every error carries a machine-readable ``code`` and the process exit code the
command-line entry point uses when the error escapes a command.
"""

from fractions import Fraction
from typing import Any, Dict, Optional


class ForestLinksError(Exception):
    """Base class for all errors raised by Forested Links."""

    code = "error"
    exit_code = 1

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {"code": self.code, "message": str(self)}


class UsageError(ForestLinksError):
    """Bad command-line usage."""
    code = "usage_error"
    exit_code = 2


class UnknownCommandError(UsageError):
    code = "unknown_command"


class ValidationError(ForestLinksError, ValueError):
    """Input that does not describe a valid object."""
    code = "invalid_input"
    exit_code = 3


class MalformedDocumentError(ValidationError):
    """A JSON or YAML document that cannot be parsed or does not match its schema."""
    code = "malformed_json"


class LinkIntersectionError(ValidationError):
    """Two link components (or a component with itself) meet in space."""
    code = "link_intersection"


class PreconditionError(ForestLinksError, ValueError):
    """A mathematical precondition of an operation is violated."""
    code = "precondition_failed"
    exit_code = 4


class RingMismatchError(PreconditionError):
    code = "ring_mismatch"


class BoundsError(PreconditionError):
    code = "out_of_bounds"


class InvalidEdgeError(PreconditionError):
    code = "invalid_edge"


class DegenerateProjectionError(PreconditionError):
    """No projection in the perturbation schedule was generic."""
    code = "degenerate_projection"


class WallEventError(PreconditionError):
    """A wall event does not apply to the population it is replayed against."""

    code = "invalid_event"

    def __init__(self, message: str, time: Optional[Fraction] = None):
        super().__init__(message if time is None else f"{message} (at time {time})")
        self.time = time

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["time"] = None if self.time is None else str(self.time)
        return data


class InvariantError(ForestLinksError):
    """An internal invariant was breached; indicates a bug or inconsistent data."""
    code = "invariant_breach"
    exit_code = 5


class NonConstantTraceError(InvariantError):
    """The weighted count changed across a wall-crossing scenario."""

    def __init__(self, message: str, time: Optional[Fraction] = None):
        super().__init__(message)
        self.time = time

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["time"] = None if self.time is None else str(self.time)
        return data
