"""Exception hierarchy shared by every pass."""

from __future__ import annotations

__all__ = [
    "IsingForgeError",
    "ModelSyntaxError",
    "ModelSemanticError",
    "MalformedGraphError",
    "PreconditionError",
    "CapExceededError",
    "FitError",
    "LatticeSizeError",
]


class IsingForgeError(Exception):
    """Base class for all package errors."""


class ModelSyntaxError(IsingForgeError):
    """Model text does not follow the grammar."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ModelSemanticError(IsingForgeError):
    """Model text parses but describes an invalid model."""


class MalformedGraphError(IsingForgeError):
    """Duplicate vertex ids, dangling edges, self-loops or parallel edges."""


class PreconditionError(IsingForgeError):
    """A rewrite was applied where its precondition does not hold."""


class CapExceededError(IsingForgeError):
    """An exact evaluation would exceed the configured enumeration cap."""


class FitError(IsingForgeError):
    """A gadget or decimation fit has no exact solution."""


class LatticeSizeError(IsingForgeError):
    """A generated lattice would exceed the configured site cap."""
