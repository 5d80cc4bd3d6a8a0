"""
Cross-entropy objective summed over samples:  E = -sum_n sum_i y_i^n log o_i^n
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from glitchnet import tensor as tc
from glitchnet.exceptions import DimensionError, ValidationError
from glitchnet.tensor import Tensor

PROBABILITY_FLOOR = 1e-12

Reduction = Literal["sum", "mean"]


@dataclass(frozen=True)
class LossValue:
    value: float
    per_sample: tuple[float, ...]

    def __float__(self):
        return self.value


def one_hot(labels, classes: int) -> Tensor:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim != 1 or np.any(labels < 0) or np.any(labels >= classes):
        raise ValidationError(f"Labels must be class indices in [0, {classes}).")
    encoded = tc.zeros((labels.size, classes))
    encoded[np.arange(labels.size), labels] = 1
    return encoded


def _row_tolerance(probs: Tensor) -> float:
    return max(1e-6, 64 * float(np.finfo(probs.dtype).eps))


def validate_distributions(probs: Tensor, labels: Tensor):
    if probs.ndim != 2 or probs.shape != labels.shape:
        raise DimensionError(f"probs {probs.shape} and labels {labels.shape} must be equal N x C tensors.")
    row_sums = probs.sum(axis=1)
    if np.any(probs < 0) or np.any(np.abs(row_sums - 1) > _row_tolerance(probs)):
        bad = int(np.argmax(np.abs(row_sums - 1)))
        raise ValidationError(f"Row {bad} of probs is not a distribution (sums to {row_sums[bad]:.9g}).")
    if not (np.all((labels == 0) | (labels == 1)) and np.all(labels.sum(axis=1) == 1)):
        raise ValidationError("Every labels row must be one-hot.")


def cross_entropy(probs: Tensor, labels: Tensor, reduction: Reduction = "sum") -> LossValue:
    """Cross-entropy of N x C posteriors against one-hot labels; probabilities are clamped at 1e-12 before log."""
    validate_distributions(probs, labels)
    clamped = np.maximum(probs.astype(np.float64), PROBABILITY_FLOOR)
    per_sample = -(labels * np.log(clamped)).sum(axis=1)
    total = float(per_sample.sum())
    if reduction == "mean":
        total /= len(per_sample)
    return LossValue(value=total, per_sample=tuple(float(v) for v in per_sample))


def softmax_xent_grad(probs: Tensor, labels: Tensor, reduction: Reduction = "sum") -> Tensor:
    """Gradient of the loss w.r.t. the softmax logits: probs - labels (divided by N for mean reduction)."""
    if probs.shape != labels.shape:
        raise DimensionError(f"probs {probs.shape} and labels {labels.shape} must have equal shapes.")
    grad = probs - labels.astype(probs.dtype)
    if reduction == "mean":
        grad = grad / probs.shape[0]
    return grad
