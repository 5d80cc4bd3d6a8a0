"""
Dense tensor primitives.

Tensors are plain ``numpy.ndarray`` values in row-major (C) order.  The dtype of every tensor created
by glitchnet is the current *precision mode*: float64 for gradient verification, float32 for training.
The mode is process-global and must not change in the middle of a run.
"""

from __future__ import annotations

import contextlib
import logging
import math
from collections.abc import Iterable, Iterator
from typing import Literal

import numpy as np

from glitchnet.exceptions import DimensionError

logger = logging.getLogger(__name__)

Tensor = np.ndarray
Shape = tuple[int, ...]
Precision = Literal["float32", "float64"]

PRECISIONS: dict[str, type[np.floating]] = {"float32": np.float32, "float64": np.float64}

_dtype: type[np.floating] = np.float32


def get_dtype() -> type[np.floating]:
    return _dtype


def set_precision(precision: Precision) -> None:
    """Select the global precision mode by name."""
    global _dtype
    try:
        _dtype = PRECISIONS[precision]
    except KeyError:
        raise ValueError(f"Unknown precision {precision!r}; expected one of {', '.join(PRECISIONS)}.") from None
    logger.debug("precision mode set to %s", precision)


def precision_name() -> str:
    return np.dtype(_dtype).name


@contextlib.contextmanager
def precision(name: Precision) -> Iterator[None]:
    """Run a block under the given precision mode, restoring the previous mode afterwards."""
    previous = precision_name()
    set_precision(name)
    try:
        yield
    finally:
        set_precision(previous)


def as_shape(dims: Iterable[int]) -> Shape:
    """Validate and return a shape: non-empty, every extent >= 1."""
    shape = tuple(int(d) for d in dims)
    if not shape or any(d < 1 for d in shape):
        raise DimensionError(f"Invalid shape {shape}: extents must be positive and non-empty.")
    return shape


def tensor(data, shape: Iterable[int] | None = None) -> Tensor:
    """Return a tensor of the current precision from nested sequences or a flat array plus shape."""
    array = np.array(data, dtype=_dtype)
    if shape is not None:
        return reshape(array, shape)
    as_shape(array.shape or (1,))
    return array


def zeros(shape: Iterable[int]) -> Tensor:
    return np.zeros(as_shape(shape), dtype=_dtype)


def zeros_like(t: Tensor) -> Tensor:
    return np.zeros_like(t, dtype=_dtype)


def flat_index(index: Iterable[int], shape: Iterable[int]) -> int:
    """Row-major flat offset of a coordinate, e.g. (i, j) in an R x C tensor is i*C + j."""
    index, shape = tuple(index), as_shape(shape)
    if len(index) != len(shape):
        raise DimensionError(f"Index {index} has {len(index)} coordinates, shape {shape} has {len(shape)} axes.")
    offset = 0
    for i, extent in zip(index, shape):
        if not 0 <= i < extent:
            raise DimensionError(f"Index {index} out of range for shape {shape}.")
        offset = offset * extent + i
    return offset


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product of an M x K and a K x N tensor."""
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(f"Cannot multiply shapes {a.shape} and {b.shape}.")
    return np.matmul(a, b)


def elementwise(op: Literal["add", "sub", "mul", "scale"], a: Tensor, b: Tensor | float) -> Tensor:
    """Elementwise add / sub / mul of equal-shape tensors, or scale by a scalar."""
    if op == "scale":
        if np.ndim(b) != 0:
            raise DimensionError(f"scale expects a scalar, got shape {np.shape(b)}.")
        return np.multiply(a, b, dtype=a.dtype)
    if np.ndim(b) == 0:
        raise DimensionError(f"{op} expects a tensor operand; use scale for scalars.")
    if a.shape != b.shape:
        raise DimensionError(f"Elementwise {op} of mismatched shapes {a.shape} and {b.shape}.")
    match op:
        case "add":
            return np.add(a, b)
        case "sub":
            return np.subtract(a, b)
        case "mul":
            return np.multiply(a, b)
        case _:
            raise ValueError(f"Unknown elementwise op {op!r}.")


def reshape(t: Tensor, shape: Iterable[int]) -> Tensor:
    """Same data, new shape; row-major order preserved."""
    shape = as_shape(shape)
    if math.prod(shape) != t.size:
        raise DimensionError(f"Cannot reshape {t.shape} ({t.size} elements) to {shape} ({math.prod(shape)} elements).")
    return np.reshape(t, shape, order="C")
