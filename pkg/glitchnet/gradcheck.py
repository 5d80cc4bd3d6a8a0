"""
Central finite-difference gradient checks, for verifying backward passes in float64.
"""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

DEFAULT_STEP = 1e-5


def numerical_gradient(loss: Callable[[], float], x: np.ndarray, h: float = DEFAULT_STEP) -> np.ndarray:
    """
    d loss / d x by central differences, perturbing ``x`` in place one element at a time.
    ``loss`` must read ``x`` when called; ``x`` is restored afterwards.
    """
    grad = np.zeros(x.shape, dtype=np.float64)
    flat, grad_flat = x.reshape(-1), grad.reshape(-1)
    if not np.shares_memory(flat, x):
        raise ValueError("numerical_gradient needs a contiguous array to perturb in place.")
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + h
        plus = loss()
        flat[i] = original - h
        minus = loss()
        flat[i] = original
        grad_flat[i] = (plus - minus) / (2 * h)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-12) -> float:
    """max |a - n| / max(|a| + |n|), a scale-aware error that tolerates near-zero entries."""
    analytic, numeric = np.asarray(analytic, dtype=np.float64), np.asarray(numeric, dtype=np.float64)
    scale = max(float(np.max(np.abs(analytic) + np.abs(numeric), initial=0.0)), floor)
    return float(np.max(np.abs(analytic - numeric), initial=0.0)) / scale
