"""Exception types shared across the package."""
from __future__ import annotations


class ParameterError(ValueError):
    """A caller-supplied parameter is outside its documented domain."""


class EdgeListError(ValueError):
    """An edge-list stream could not be parsed; carries the offending line."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class GraphStructureError(ValueError):
    """Graph data violates a structural invariant (self loop, duplicate edge, ...)."""


class CapacityError(ValueError):
    """Input exceeds a hard size guard of an exhaustive computation."""


class ConversionError(ValueError):
    """The graph cannot be converted to a Markov chain (e.g. a node with no in-edges)."""


class ReducibleChainError(ValueError):
    """The chain is reducible; stationary solvers need irreducibility.

    Callers should fall back to tree-weight scoring (``tree_weight_stationary``),
    which is exact for irreducible chains and remains well defined otherwise.
    """


class NumericalError(RuntimeError):
    """A numerical routine failed to meet its residual/stability contract."""


class InconsistentCascadeError(ValueError):
    """A cascade (or active set) is not consistent with the graph it claims to be from."""
