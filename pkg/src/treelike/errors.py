"""Exception hierarchy shared by every module."""

from __future__ import annotations


class TreelikeError(Exception):
    """Base class for all library errors."""


class GraphFormatError(TreelikeError, ValueError):
    """Malformed graph, walling, pocset, cut-family or decomposition input."""


class InvalidVertexError(TreelikeError, IndexError):
    pass


class DisconnectedError(TreelikeError, ValueError):
    """An operation needing one connected component got several."""


class NotMedianError(TreelikeError, ValueError):
    """Raised when a median-only operation meets a non-median graph.

    ``certificate`` carries the rejecting witness when one is known.
    """

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class ContractError(TreelikeError, ValueError):
    """A documented precondition was violated by the caller."""


class CapExceededError(TreelikeError, RuntimeError):
    """An enumeration would exceed its configured size cap."""


class PocsetError(TreelikeError, ValueError):
    """A pocset axiom fails; ``axiom`` names which one."""

    def __init__(self, axiom: str, detail: str):
        super().__init__(f"{axiom}: {detail}")
        self.axiom = axiom
        self.detail = detail


class TreeDecompositionError(TreelikeError, ValueError):
    """A tree-decomposition clause fails; ``clause`` names which one."""

    def __init__(self, clause: str, detail: str, witness=None):
        super().__init__(f"{clause}: {detail}")
        self.clause = clause
        self.detail = detail
        self.witness = witness


class InvariantViolation(TreelikeError, AssertionError):
    """An internal construction broke one of its own guarantees (a bug)."""


class CertificationError(TreelikeError, ValueError):
    """A windowed computation touched a vertex outside the certified region."""
