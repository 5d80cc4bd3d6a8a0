"""
Adadelta parameter updates.

Per element, with accumulators E[g^2] and E[dx^2] and RMS[v] = sqrt(v + eps):

    E[g^2]  <- rho E[g^2] + (1 - rho) g^2
    dx      =  -(RMS[E[dx^2]] / RMS[E[g^2]]) g
    E[dx^2] <- rho E[dx^2] + (1 - rho) dx^2
    x       <- x + dx

There is no global learning rate.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from glitchnet.exceptions import DimensionError, NumericError
from glitchnet.tensor import Tensor

DEFAULT_RHO = 0.95
DEFAULT_EPS = 1e-6


@dataclass
class AdadeltaState:
    acc_grad_sq: Tensor
    acc_delta_sq: Tensor
    rho: float = DEFAULT_RHO
    eps: float = DEFAULT_EPS

    @classmethod
    def fresh(cls, like: Tensor, rho: float = DEFAULT_RHO, eps: float = DEFAULT_EPS) -> AdadeltaState:
        return cls(np.zeros_like(like), np.zeros_like(like), rho=rho, eps=eps)


def adadelta_step(params: Tensor, grads: Tensor, state: AdadeltaState, name: str = "parameter") -> Tensor:
    """Update ``params`` and both accumulators in place; returns the applied update dx."""
    if not (params.shape == grads.shape == state.acc_grad_sq.shape == state.acc_delta_sq.shape):
        raise DimensionError(
            f"{name}: params {params.shape}, grads {grads.shape} and state {state.acc_grad_sq.shape} must agree."
        )
    if not np.all(np.isfinite(grads)):
        raise NumericError(f"Non-finite gradient for {name}.")
    rho, eps = state.rho, state.eps
    state.acc_grad_sq *= rho
    state.acc_grad_sq += (1 - rho) * np.square(grads)
    delta = -np.sqrt(state.acc_delta_sq + eps) / np.sqrt(state.acc_grad_sq + eps) * grads
    state.acc_delta_sq *= rho
    state.acc_delta_sq += (1 - rho) * np.square(delta)
    params += delta.astype(params.dtype, copy=False)
    return delta


@dataclass
class Adadelta:
    """Adadelta over a set of named parameter tensors, one state per name."""

    rho: float = DEFAULT_RHO
    eps: float = DEFAULT_EPS
    states: dict[str, AdadeltaState] = field(default_factory=dict)

    def check(self, params: Mapping[str, Tensor], grads: Mapping[str, Tensor]):
        """Raise for a missing, misshapen or non-finite gradient before anything is updated."""
        for name, param in params.items():
            if name not in grads:
                raise DimensionError(f"No gradient supplied for parameter {name}.")
            grad = grads[name]
            if param.shape != grad.shape:
                raise DimensionError(f"{name}: params {param.shape} and grads {grad.shape} must agree.")
            state = self.states.get(name)
            if state is not None and state.acc_grad_sq.shape != param.shape:
                raise DimensionError(f"{name}: params {param.shape} and state {state.acc_grad_sq.shape} must agree.")
            if not np.all(np.isfinite(grad)):
                raise NumericError(f"Non-finite gradient for {name}.")

    def step(self, params: Mapping[str, Tensor], grads: Mapping[str, Tensor]):
        """Update every parameter, or none of them if any gradient is rejected."""
        self.check(params, grads)
        for name, param in params.items():
            state = self.states.get(name)
            if state is None:
                state = self.states[name] = AdadeltaState.fresh(param, self.rho, self.eps)
            adadelta_step(param, grads[name], state, name=name)
