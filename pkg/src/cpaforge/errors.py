"""Exception types shared across the toolkit.

Every error that can be traced to a specific line of an input document
carries that line number in ``.line`` (1-based); programmatic errors leave
it ``None``.
"""

from __future__ import annotations


class ToolError(Exception):
    """Base class for all cpaforge errors."""

    def __init__(self, message: str, *, line: int | None = None):
        super().__init__(message)
        self.message = message
        self.line = line

    @property
    def code(self) -> str:
        return type(self).__name__

    def __str__(self) -> str:
        if self.line is not None:
            return f"line {self.line}: {self.message}"
        return self.message


# --- .inp parsing ---------------------------------------------------------

class MalformedSection(ToolError):
    """Section header or row does not follow the expected shape."""


class MalformedControl(ToolError):
    """A [CONTROLS] statement does not match the supported grammar."""


class DanglingReference(ToolError):
    """A reference does not resolve to any known element."""


# --- cyber topology -------------------------------------------------------

class InvalidIdentifier(ToolError):
    """Identifier contains characters the scenario grammar cannot carry."""


class DuplicateId(ToolError):
    """Identifier already taken within its namespace."""


class DuplicateLink(ToolError):
    """A (source, destination) link pair already exists."""


class UnknownEndpoint(ToolError):
    """Link endpoint is missing from the topology, or is a self-loop."""


class SensorNotAtSource(ToolError):
    """A link carries a sensor its source node does not own."""


# --- attack construction / scenario documents ------------------------------

class UnknownTarget(ToolError):
    """Attack target does not resolve against the topology or model."""


class IncompleteParams(ToolError):
    """Attack parameters are missing or inconsistent for the given kind."""


class InvalidWindow(ToolError):
    """Attack start/end conditions are malformed or ordered wrongly."""


class UnknownAttackKind(ToolError):
    """Attack kind token is not one of the four supported kinds."""


class ValidationFailed(ToolError):
    """Aggregate of diagnostics raised when rendering invalid state."""

    def __init__(self, diagnostics, *, line: int | None = None):
        self.diagnostics = tuple(diagnostics)
        summary = "; ".join(str(d) for d in self.diagnostics) or "validation failed"
        super().__init__(summary, line=line)


# --- resilience metrics -----------------------------------------------------

class EndpointMismatch(ToolError):
    """Two paths compared for diversity do not share endpoints."""


class UnknownVertex(ToolError):
    """Vertex absent from the graph."""


class EnumerationBudgetExceeded(ToolError):
    """Path enumeration outgrew the configured budget."""


class GraphTooSmall(ToolError):
    """Graph-wide diversity needs at least two vertices."""


# --- sessions ---------------------------------------------------------------

class UnknownSession(ToolError):
    """No session with the given id."""


class UnknownCommand(ToolError):
    """Command kind is not recognised."""
