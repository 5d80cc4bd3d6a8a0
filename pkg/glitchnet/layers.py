"""
Forward and backward passes for the layer types of the glitch classifiers:
valid 2-D convolution, 2x2 max-pooling, ReLU, flatten, fully-connected, softmax,
plus the channel-concatenation merger used by the parallel-view model.

Layers take one sample (C x H x W, or a vector for dense / softmax layers) or a batch with a leading
N axis, and cache what backward needs from the most recent forward call.
A layer instance is single-threaded state; disable caching for shared inference-only use.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator, Sequence

import numpy as np

from glitchnet import tensor as tc
from glitchnet.exceptions import DimensionError, LayerStateError, NumericError
from glitchnet.tensor import Shape, Tensor

logger = logging.getLogger(__name__)

POOL_WINDOW = 2


def glorot_uniform(rng: np.random.Generator, shape: Shape, fan_in: int, fan_out: int) -> Tensor:
    """Uniform in +-sqrt(6 / (fan_in + fan_out))."""
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(tc.get_dtype())


# Batched kernels.  x is always N x C x H x W here.


def conv2d_valid(x: Tensor, kernels: Tensor, bias: Tensor) -> Tensor:
    """Valid cross-correlation (no kernel flip, stride 1) plus per-filter bias."""
    n, c, h, w = x.shape
    k, kc, f, _ = kernels.shape
    if kc != c:
        raise DimensionError(f"Input has {c} channels but kernels {kernels.shape} expect {kc}.")
    if h < f or w < f:
        raise DimensionError(f"Input {x.shape[1:]} is smaller than the {f}x{f} kernel.")
    ho, wo = h - f + 1, w - f + 1
    out = np.zeros((n, ho, wo, k), dtype=x.dtype)
    # accumulate one kernel offset at a time: each step is a (C -> K) matrix product over all positions
    for i in range(f):
        for j in range(f):
            out += np.tensordot(x[:, :, i : i + ho, j : j + wo], kernels[:, :, i, j], axes=([1], [1]))
    return out.transpose(0, 3, 1, 2) + bias.reshape(1, k, 1, 1)


def conv2d_valid_backward(grad_out: Tensor, x: Tensor, kernels: Tensor) -> tuple[Tensor, Tensor, Tensor]:
    """Gradients w.r.t. input, kernels and bias of ``conv2d_valid``."""
    _, _, f, _ = kernels.shape
    ho, wo = grad_out.shape[2:]
    grad_x = np.zeros_like(x)
    grad_k = np.empty_like(kernels)
    g = grad_out.transpose(0, 2, 3, 1)  # N x Ho x Wo x K
    for i in range(f):
        for j in range(f):
            patch = x[:, :, i : i + ho, j : j + wo]
            grad_k[:, :, i, j] = np.tensordot(grad_out, patch, axes=([0, 2, 3], [0, 2, 3]))
            grad_x[:, :, i : i + ho, j : j + wo] += np.tensordot(g, kernels[:, :, i, j], axes=([3], [0])).transpose(
                0, 3, 1, 2
            )
    grad_b = grad_out.sum(axis=(0, 2, 3))
    return grad_x, grad_k, grad_b


def _pool_windows(x: Tensor) -> Tensor:
    """N x C x H x W -> N x C x H//2 x W//2 x 4, window elements in row-major order; odd trailing row/col dropped."""
    n, c, h, w = x.shape
    ho, wo = h // POOL_WINDOW, w // POOL_WINDOW
    trimmed = x[:, :, : ho * POOL_WINDOW, : wo * POOL_WINDOW]
    return trimmed.reshape(n, c, ho, POOL_WINDOW, wo, POOL_WINDOW).transpose(0, 1, 2, 4, 3, 5).reshape(n, c, ho, wo, -1)


def maxpool2d(x: Tensor) -> tuple[Tensor, Tensor]:
    """2x2 max-pooling; returns the pooled tensor and the within-window argmax (first maximum wins)."""
    h, w = x.shape[2:]
    if h < POOL_WINDOW or w < POOL_WINDOW:
        raise DimensionError(f"Cannot 2x2-pool spatial extent {(h, w)}.")
    windows = _pool_windows(x)
    argmax = windows.argmax(axis=-1)
    pooled = np.take_along_axis(windows, argmax[..., np.newaxis], axis=-1)[..., 0]
    return pooled, argmax


def maxpool2d_backward(grad_out: Tensor, argmax: Tensor, input_shape: Shape) -> Tensor:
    """Route each pooled gradient to its argmax position; zeros elsewhere."""
    n, c, ho, wo = grad_out.shape
    windows = np.zeros((n, c, ho, wo, POOL_WINDOW * POOL_WINDOW), dtype=grad_out.dtype)
    np.put_along_axis(windows, argmax[..., np.newaxis], grad_out[..., np.newaxis], axis=-1)
    grad_in = np.zeros(input_shape, dtype=grad_out.dtype)
    grad_in[:, :, : ho * POOL_WINDOW, : wo * POOL_WINDOW] = (
        windows.reshape(n, c, ho, wo, POOL_WINDOW, POOL_WINDOW)
        .transpose(0, 1, 2, 4, 3, 5)
        .reshape(n, c, ho * POOL_WINDOW, wo * POOL_WINDOW)
    )
    return grad_in


def softmax(logits: Tensor) -> Tensor:
    """Row-wise softmax of an N x C (or length-C) tensor, max-subtracted for overflow safety."""
    if logits.shape[-1] < 2:
        raise DimensionError(f"Softmax needs at least 2 classes, got shape {logits.shape}.")
    if not np.all(np.isfinite(logits)):
        raise NumericError("Softmax received non-finite logits.")
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


class Layer:
    """
    Base layer.

    Subclasses implement ``_forward(x) -> (out, cache)`` and ``_backward(grad_out, cache) -> grad_in`` on
    batched input, and ``output_shape`` on per-sample shapes.  Parameters and their gradients live in the
    ``params`` / ``grads`` dicts under the same keys.
    """

    sample_ndim: int = 3

    def __init__(self):
        self.params: dict[str, Tensor] = {}
        self.grads: dict[str, Tensor] = {}
        self.caching = True
        self._cache = None
        self._batched = True
        self._out_shape: Shape | None = None

    def __repr__(self):
        return f"{type(self).__name__}()"

    def output_shape(self, input_shape: Shape) -> Shape:
        return input_shape

    def forward(self, x: Tensor) -> Tensor:
        if x.ndim == self.sample_ndim + 1:
            batched = True
        elif x.ndim == self.sample_ndim:
            batched, x = False, x[np.newaxis]
        else:
            raise DimensionError(f"{self!r} expects {self.sample_ndim}-d samples or a batch of them, got {x.shape}.")
        out, cache = self._forward(x)
        if self.caching:
            self._cache, self._batched, self._out_shape = cache, batched, out.shape
        return out if batched else out[0]

    def backward(self, grad_out: Tensor) -> Tensor:
        if self._cache is None:
            raise LayerStateError(f"{self!r}.backward called before forward.")
        g = grad_out if self._batched else grad_out[np.newaxis]
        if g.shape != self._out_shape:
            raise DimensionError(f"{self!r}.backward got gradient {grad_out.shape}, forward produced {self._out_shape}.")
        grad_in = self._backward(g, self._cache)
        return grad_in if self._batched else grad_in[0]

    def clear_cache(self):
        self._cache = None

    def _forward(self, x: Tensor) -> tuple[Tensor, object]:
        raise NotImplementedError

    def _backward(self, grad_out: Tensor, cache) -> Tensor:
        raise NotImplementedError


class Conv2D(Layer):
    """Valid, stride-1 convolution with ``filters`` kernels of size ``kernel_size`` x ``kernel_size``."""

    def __init__(self, in_channels: int, filters: int, kernel_size: int, rng: np.random.Generator):
        super().__init__()
        if in_channels < 1 or filters < 1 or kernel_size < 1:
            raise DimensionError(f"Invalid conv spec: {in_channels} channels, {filters} filters, size {kernel_size}.")
        shape = (filters, in_channels, kernel_size, kernel_size)
        receptive = kernel_size * kernel_size
        self.params["kernels"] = glorot_uniform(rng, shape, in_channels * receptive, filters * receptive)
        self.params["bias"] = tc.zeros((filters,))

    def __repr__(self):
        k, c, f, _ = self.params["kernels"].shape
        return f"Conv2D({c}->{k}, {f}x{f})"

    def output_shape(self, input_shape: Shape) -> Shape:
        k, c, f, _ = self.params["kernels"].shape
        channels, h, w = input_shape
        if channels != c:
            raise DimensionError(f"{self!r} expects {c} input channels, got {channels}.")
        if h < f or w < f:
            raise DimensionError(f"{self!r} input {input_shape} is smaller than its kernel.")
        return (k, h - f + 1, w - f + 1)

    def _forward(self, x):
        return conv2d_valid(x, self.params["kernels"], self.params["bias"]), x

    def _backward(self, grad_out, x):
        grad_x, self.grads["kernels"], self.grads["bias"] = conv2d_valid_backward(grad_out, x, self.params["kernels"])
        return grad_x


class MaxPool2D(Layer):
    """Non-overlapping 2x2 max-pooling, floor on odd extents."""

    def __repr__(self):
        return "MaxPool2D(2x2)"

    def output_shape(self, input_shape: Shape) -> Shape:
        c, h, w = input_shape
        if h < POOL_WINDOW or w < POOL_WINDOW:
            raise DimensionError(f"{self!r} cannot pool spatial extent {(h, w)}.")
        return (c, h // POOL_WINDOW, w // POOL_WINDOW)

    def _forward(self, x):
        pooled, argmax = maxpool2d(x)
        return pooled, (argmax, x.shape)

    def _backward(self, grad_out, cache):
        argmax, input_shape = cache
        return maxpool2d_backward(grad_out, argmax, input_shape)


class ReLU(Layer):
    """max(0, x); the derivative at exactly 0 is taken as 0."""

    def forward(self, x: Tensor) -> Tensor:
        out = np.maximum(x, 0)
        if self.caching:
            self._cache, self._out_shape = x > 0, out.shape
        return out

    def backward(self, grad_out: Tensor) -> Tensor:
        if self._cache is None:
            raise LayerStateError(f"{self!r}.backward called before forward.")
        if grad_out.shape != self._out_shape:
            raise DimensionError(f"{self!r}.backward got gradient {grad_out.shape}, forward produced {self._out_shape}.")
        return grad_out * self._cache


class Flatten(Layer):
    def output_shape(self, input_shape: Shape) -> Shape:
        return (math.prod(input_shape),)

    def _forward(self, x):
        return tc.reshape(x, (x.shape[0], math.prod(x.shape[1:]))), x.shape

    def _backward(self, grad_out, input_shape):
        return tc.reshape(grad_out, input_shape)


class Dense(Layer):
    """Fully-connected layer: W.x + b with W of shape out x in."""

    sample_ndim = 1

    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator):
        super().__init__()
        if in_features < 1 or out_features < 1:
            raise DimensionError(f"Invalid dense spec {in_features}->{out_features}.")
        self.params["weights"] = glorot_uniform(rng, (out_features, in_features), in_features, out_features)
        self.params["bias"] = tc.zeros((out_features,))

    def __repr__(self):
        out_features, in_features = self.params["weights"].shape
        return f"Dense({in_features}->{out_features})"

    def output_shape(self, input_shape: Shape) -> Shape:
        out_features, in_features = self.params["weights"].shape
        if input_shape != (in_features,):
            raise DimensionError(f"{self!r} expects input ({in_features},), got {input_shape}.")
        return (out_features,)

    def _forward(self, x):
        weights = self.params["weights"]
        if x.shape[1] != weights.shape[1]:
            raise DimensionError(f"{self!r} got input of length {x.shape[1]}.")
        return tc.matmul(x, weights.T) + self.params["bias"], x

    def _backward(self, grad_out, x):
        self.grads["weights"] = tc.matmul(grad_out.T, x)
        self.grads["bias"] = grad_out.sum(axis=0)
        return tc.matmul(grad_out, self.params["weights"])


class Softmax(Layer):
    sample_ndim = 1

    def _forward(self, x):
        probs = softmax(x)
        return probs, probs

    def _backward(self, grad_out, probs):
        return probs * (grad_out - (grad_out * probs).sum(axis=1, keepdims=True))


class ChannelConcat:
    """Merger layer: concatenate per-view feature maps along the channel axis."""

    def __init__(self):
        self._splits: list[int] | None = None

    def __repr__(self):
        return "ChannelConcat()"

    @staticmethod
    def output_shape(input_shapes: Sequence[Shape]) -> Shape:
        spatial = {s[1:] for s in input_shapes}
        if len(spatial) != 1:
            raise DimensionError(f"Cannot concatenate feature maps of shapes {list(input_shapes)}.")
        return (sum(s[0] for s in input_shapes), *spatial.pop())

    def forward(self, xs: Sequence[Tensor]) -> Tensor:
        channel_axis = xs[0].ndim - 3
        self._splits = list(np.cumsum([x.shape[channel_axis] for x in xs])[:-1])
        return np.concatenate(xs, axis=channel_axis)

    def backward(self, grad_out: Tensor) -> list[Tensor]:
        if self._splits is None:
            raise LayerStateError(f"{self!r}.backward called before forward.")
        return np.split(grad_out, self._splits, axis=grad_out.ndim - 3)


class LayerStack:
    """Ordered layers run front to back on forward and back to front on backward."""

    def __init__(self, layers: Sequence[Layer]):
        self.layers = list(layers)

    def __repr__(self):
        return f"LayerStack({', '.join(map(repr, self.layers))})"

    def __iter__(self) -> Iterator[Layer]:
        return iter(self.layers)

    def __len__(self):
        return len(self.layers)

    def shape_trace(self, input_shape: Shape) -> list[Shape]:
        """Per-sample output shape after each layer."""
        shapes, shape = [], tuple(input_shape)
        for layer in self.layers:
            shape = layer.output_shape(shape)
            shapes.append(shape)
        return shapes

    def forward(self, x: Tensor) -> Tensor:
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def backward(self, grad_out: Tensor, skip_last: int = 0) -> Tensor:
        """Backpropagate through the stack; ``skip_last`` layers at the top are treated as already handled."""
        layers = self.layers[: len(self.layers) - skip_last]
        for layer in reversed(layers):
            grad_out = layer.backward(grad_out)
        return grad_out

    def set_caching(self, enabled: bool):
        for layer in self.layers:
            layer.caching = enabled
            if not enabled:
                layer.clear_cache()

    def named_parameters(self, prefix: str) -> Iterator[tuple[str, Layer, str]]:
        """Yield ``(qualified name, layer, key)`` for every parameter, e.g. ``trunk.0.kernels``."""
        for index, layer in enumerate(self.layers):
            for key in layer.params:
                yield f"{prefix}.{index}.{key}", layer, key
