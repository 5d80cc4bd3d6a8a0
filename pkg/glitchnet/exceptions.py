"""
Exceptions raised by glitchnet.

Each error subclasses the matching builtin so callers can catch either.
"""

from __future__ import annotations


class GlitchnetError(Exception):
    """Base class for every error raised by glitchnet."""


class DimensionError(GlitchnetError, ValueError):
    """Tensor shapes do not agree with what an operation requires."""


class BuildError(GlitchnetError, ValueError):
    """An architecture cannot be assembled for the requested input spec."""


class LayerStateError(GlitchnetError, RuntimeError):
    """A stateful operation was called out of order, e.g. backward before forward."""


class NumericError(GlitchnetError, ArithmeticError):
    """Non-finite values reached an operation that cannot accept them."""


class ValidationError(GlitchnetError, ValueError):
    """Inputs are well-formed but semantically invalid (not a distribution, empty corpus, ...)."""


class CorpusIOError(GlitchnetError, OSError):
    """A corpus directory or view file could not be read or written."""

    def __init__(self, path, message: str):
        self.path = str(path)
        super().__init__(f"{self.path}: {message}")


class CheckpointError(GlitchnetError, ValueError):
    """A checkpoint file is malformed or does not match the requested architecture."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
