"""
The three glitch classifier architectures.

single view    one duration's view -> [conv, pool, relu] -> trunk
parallel view  each of the four views -> its own [conv, pool, relu] branch -> merger (channel concat) -> trunk
merged view    the four views tiled into one 2m x 2k image -> [conv, pool, relu] -> trunk

trunk          [conv, pool, relu] -> flatten -> dense(hidden) -> dense(classes) -> softmax

Every architecture is built as branches + optional merger + trunk, so parameters are uniformly named
``branch<b>.<layer>.<key>`` and ``trunk.<layer>.<key>``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from glitchnet import tensor as tc
from glitchnet.exceptions import BuildError, DimensionError, LayerStateError, ValidationError
from glitchnet.layers import ChannelConcat, Conv2D, Dense, Flatten, LayerStack, MaxPool2D, ReLU, Softmax
from glitchnet.tensor import Shape, Tensor

logger = logging.getLogger(__name__)

DURATIONS = (0.5, 1.0, 2.0, 4.0)  # seconds per view, in view order
VIEW_COUNT = len(DURATIONS)
VIEW_SHAPE = (47, 57)

Kind = Literal["single", "parallel", "merged"]
MODEL_NAMES = tuple(f"single{i}" for i in range(VIEW_COUNT)) + ("parallel", "merged")


def pixels_in_range(views: np.ndarray) -> bool:
    return bool(np.all((views >= 0.0) & (views <= 1.0)))


@dataclass(frozen=True, eq=False)
class MultiViewSample:
    """Four grayscale views of one glitch, ordered 0.5 s, 1.0 s, 2.0 s, 4.0 s, plus its class label."""

    views: np.ndarray  # VIEW_COUNT x m x k, float32 pixels in [0, 1]
    label: int
    sample_id: str = ""

    def __post_init__(self):
        if self.views.ndim != 3 or self.views.shape[0] != VIEW_COUNT:
            raise DimensionError(f"Expected {VIEW_COUNT} equal-shape views, got array of shape {self.views.shape}.")
        if not pixels_in_range(self.views):
            raise ValidationError(f"Pixel values of sample {self.sample_id or '?'} must lie in [0, 1].")

    def __eq__(self, other):
        if not isinstance(other, MultiViewSample):
            return NotImplemented
        return (
            self.label == other.label
            and self.sample_id == other.sample_id
            and self.views.dtype == other.views.dtype
            and np.array_equal(self.views, other.views)
        )

    __hash__ = None

    @property
    def view_shape(self) -> tuple[int, int]:
        return self.views.shape[1:]

    def view(self, index: int) -> Tensor:
        """One view as a 1 x m x k tensor."""
        return self.views[index][np.newaxis]


def tile_view_arrays(views: np.ndarray) -> np.ndarray:
    """... x 4 x m x k -> ... x 1 x 2m x 2k: 0.5 s top-left, 1.0 s top-right, 2.0 s bottom-left, 4.0 s bottom-right."""
    if views.ndim < 3 or views.shape[-3] != VIEW_COUNT:
        raise DimensionError(f"Expected {VIEW_COUNT} views to tile, got shape {views.shape}.")
    top = np.concatenate([views[..., 0, :, :], views[..., 1, :, :]], axis=-1)
    bottom = np.concatenate([views[..., 2, :, :], views[..., 3, :, :]], axis=-1)
    return np.concatenate([top, bottom], axis=-2)[..., np.newaxis, :, :]


def tile_views(sample: MultiViewSample) -> Tensor:
    """Tile a sample's four m x k views into one 1 x 2m x 2k image (the merged-view input)."""
    return tile_view_arrays(sample.views)


def crop_quadrants(tiled: Tensor) -> np.ndarray:
    """Inverse of ``tile_views``: 1 x 2m x 2k -> 4 x m x k."""
    _, height, width = tiled.shape
    if height % 2 or width % 2:
        raise DimensionError(f"Tiled image {tiled.shape} does not split into equal quadrants.")
    m, k = height // 2, width // 2
    image = tiled[0]
    return np.stack([image[:m, :k], image[:m, k:], image[m:, :k], image[m:, k:]])


@dataclass(frozen=True)
class ModelSpec:
    """Everything needed to rebuild an architecture; also what checkpoints record."""

    kind: Kind
    duration_index: int | None = None
    view_shape: tuple[int, int] = VIEW_SHAPE
    classes: int = 20
    filters: int = 128
    kernel_size: int = 5
    hidden: int = 256

    def __post_init__(self):
        if self.kind not in ("single", "parallel", "merged"):
            raise BuildError(f"Unknown architecture kind {self.kind!r}.")
        if self.kind == "single" and self.duration_index not in range(VIEW_COUNT):
            raise BuildError(f"Single-view models need a duration index in 0..{VIEW_COUNT - 1}.")
        if self.kind != "single" and self.duration_index is not None:
            raise BuildError(f"{self.kind}-view models use all durations; got duration index {self.duration_index}.")
        object.__setattr__(self, "view_shape", tuple(self.view_shape))

    @classmethod
    def from_name(cls, name: str, **kwargs) -> ModelSpec:
        """``single0`` .. ``single3`` (0.5 s .. 4 s), ``parallel`` or ``merged``."""
        if name not in MODEL_NAMES:
            raise BuildError(f"Unknown model {name!r}; valid names: {', '.join(MODEL_NAMES)}.")
        if name.startswith("single"):
            return cls(kind="single", duration_index=int(name[-1]), **kwargs)
        return cls(kind=name, **kwargs)

    @property
    def name(self) -> str:
        return f"single{self.duration_index}" if self.kind == "single" else self.kind

    @property
    def input_shapes(self) -> list[Shape]:
        m, k = self.view_shape
        match self.kind:
            case "single":
                return [(1, m, k)]
            case "parallel":
                return [(1, m, k)] * VIEW_COUNT
            case _:
                return [(1, 2 * m, 2 * k)]

    def to_dict(self) -> dict:
        return {**asdict(self), "view_shape": list(self.view_shape)}

    @classmethod
    def from_dict(cls, data: dict) -> ModelSpec:
        return cls(**{**data, "view_shape": tuple(data["view_shape"])})


@dataclass
class Architecture:
    spec: ModelSpec
    branches: list[LayerStack]
    trunk: LayerStack
    merger: ChannelConcat | None = None
    pipeline: list[Shape] = field(default_factory=list)  # distinct shapes from input to output
    _forward_called: bool = field(default=False, repr=False)

    @property
    def name(self) -> str:
        return self.spec.name

    # -- parameters

    def named_layers(self):
        for b, branch in enumerate(self.branches):
            yield from branch.named_parameters(f"branch{b}")
        yield from self.trunk.named_parameters("trunk")

    def parameters(self) -> dict[str, Tensor]:
        return {name: layer.params[key] for name, layer, key in self.named_layers()}

    def gradients(self) -> dict[str, Tensor]:
        if not self._forward_called:
            raise LayerStateError(f"{self.name}: no gradients before forward/backward.")
        return {name: layer.grads[key] for name, layer, key in self.named_layers()}

    def parameter_count(self) -> int:
        return sum(p.size for p in self.parameters().values())

    def load_parameters(self, values: dict[str, np.ndarray]):
        """Copy values into the live parameter tensors (cast to the current precision)."""
        for name, layer, key in self.named_layers():
            try:
                value = values[name]
            except KeyError:
                raise BuildError(f"{self.name}: missing parameter {name}.") from None
            if value.shape != layer.params[key].shape:
                raise DimensionError(f"{name}: expected shape {layer.params[key].shape}, got {value.shape}.")
            layer.params[key] = np.array(value, dtype=tc.get_dtype())

    def snapshot(self) -> dict[str, np.ndarray]:
        return {name: value.copy() for name, value in self.parameters().items()}

    def set_caching(self, enabled: bool):
        for stack in (*self.branches, self.trunk):
            stack.set_caching(enabled)

    # -- inputs

    def prepare_inputs(self, views: np.ndarray) -> list[Tensor]:
        """Per-branch input tensors from an N x 4 x m x k (or 4 x m x k) array of views."""
        if views.shape[-3:] != (VIEW_COUNT, *self.spec.view_shape):
            raise DimensionError(
                f"{self.name} expects views of shape {(VIEW_COUNT, *self.spec.view_shape)}, got {views.shape[-3:]}."
            )
        views = np.asarray(views, dtype=tc.get_dtype())
        match self.spec.kind:
            case "single":
                i = self.spec.duration_index
                return [views[..., i : i + 1, :, :]]
            case "parallel":
                return [views[..., i : i + 1, :, :] for i in range(VIEW_COUNT)]
            case _:
                return [tile_view_arrays(views)]

    # -- passes

    def forward_inputs(self, inputs: Sequence[Tensor]) -> Tensor:
        if len(inputs) != len(self.branches):
            raise DimensionError(f"{self.name} takes {len(self.branches)} inputs, got {len(inputs)}.")
        features = [branch.forward(x) for branch, x in zip(self.branches, inputs)]
        merged = self.merger.forward(features) if self.merger else features[0]
        self._forward_called = True
        return self.trunk.forward(merged)

    def forward(self, samples: MultiViewSample | Sequence[MultiViewSample]) -> Tensor:
        """Class posterior for one sample (C) or a sequence of samples (N x C)."""
        if isinstance(samples, MultiViewSample):
            return self.forward_inputs(self.prepare_inputs(samples.views))
        return self.forward_inputs(self.prepare_inputs(np.stack([s.views for s in samples])))

    def backward(self, grad: Tensor, from_logits: bool = False) -> dict[str, Tensor]:
        """
        Backpropagate ``grad`` (w.r.t. the posterior, or w.r.t. the logits when ``from_logits``)
        and return the gradient of every parameter.
        """
        if not self._forward_called:
            raise LayerStateError(f"{self.name}.backward called before forward.")
        grad = self.trunk.backward(grad, skip_last=1 if from_logits else 0)
        branch_grads = self.merger.backward(grad) if self.merger else [grad]
        for branch, g in zip(self.branches, branch_grads):
            branch.backward(g)
        return self.gradients()


def _feature_block(in_channels: int, spec: ModelSpec, rng: np.random.Generator) -> list:
    return [Conv2D(in_channels, spec.filters, spec.kernel_size, rng), MaxPool2D(), ReLU()]


def _distinct(shapes: Sequence[Shape]) -> list[Shape]:
    out = []
    for shape in shapes:
        if not out or out[-1] != shape:
            out.append(shape)
    return out


def build(spec: ModelSpec, seed: int = 0, equal_branch_init: bool = False) -> Architecture:
    """
    Build and shape-validate an architecture.

    Weights are Glorot-uniform from ``seed``; biases start at zero.  With ``equal_branch_init`` every
    parallel-view branch starts from identical weights.
    """
    rng = np.random.default_rng(seed)
    input_shapes = spec.input_shapes
    branch_count = VIEW_COUNT if spec.kind == "parallel" else 1
    branches = [LayerStack(_feature_block(1, spec, rng))]
    for _ in range(branch_count - 1):
        branch = LayerStack(_feature_block(1, spec, rng))
        if equal_branch_init:
            for mine, first in zip(branch, branches[0]):
                mine.params = {key: value.copy() for key, value in first.params.items()}
        branches.append(branch)
    merger = ChannelConcat() if branch_count > 1 else None

    try:
        branch_traces = [branch.shape_trace(shape) for branch, shape in zip(branches, input_shapes)]
        branch_out = [trace[-1] for trace in branch_traces]
        trunk_in = merger.output_shape(branch_out) if merger else branch_out[0]
        conv = Conv2D(trunk_in[0], spec.filters, spec.kernel_size, rng)
        pooled = MaxPool2D().output_shape(conv.output_shape(trunk_in))
        flat = math.prod(pooled)
        trunk = LayerStack(
            [
                conv,
                MaxPool2D(),
                ReLU(),
                Flatten(),
                Dense(flat, spec.hidden, rng),
                Dense(spec.hidden, spec.classes, rng),
                Softmax(),
            ]
        )
        trunk_trace = trunk.shape_trace(trunk_in)
    except DimensionError as e:
        raise BuildError(f"Cannot build {spec.name} for input {input_shapes[0]}: {e}") from e

    pipeline = _distinct([input_shapes[0], *branch_traces[0], trunk_in, *trunk_trace])
    arch = Architecture(spec=spec, branches=branches, trunk=trunk, merger=merger, pipeline=pipeline)
    logger.debug("built %s: %s (%d parameters)", spec.name, pipeline, arch.parameter_count())
    return arch


def build_single_view(duration_index: int, seed: int = 0, **sizes) -> Architecture:
    return build(ModelSpec(kind="single", duration_index=duration_index, **sizes), seed)


def build_parallel_view(
    input_shapes: Sequence[Shape] | None = None, seed: int = 0, equal_branch_init: bool = False, **sizes
) -> Architecture:
    if input_shapes is not None:
        shapes = {tuple(s) for s in input_shapes}
        if len(input_shapes) != VIEW_COUNT or len(shapes) != 1:
            raise BuildError(f"Parallel view needs {VIEW_COUNT} equal-shape inputs, got {list(input_shapes)}.")
        sizes["view_shape"] = shapes.pop()[1:]
    return build(ModelSpec(kind="parallel", **sizes), seed, equal_branch_init=equal_branch_init)


def build_merged_view(seed: int = 0, **sizes) -> Architecture:
    return build(ModelSpec(kind="merged", **sizes), seed)


def predict(arch: Architecture, views: np.ndarray, batch_size: int = 64) -> tuple[np.ndarray, Tensor]:
    """Predicted labels (ties to the lowest class index) and posteriors for an N x 4 x m x k view array."""
    if len(views) == 0:
        return np.empty(0, dtype=np.int64), tc.zeros((1, arch.spec.classes))[:0]
    arch.set_caching(False)
    try:
        probs = np.concatenate(
            [
                arch.forward_inputs(arch.prepare_inputs(views[start : start + batch_size]))
                for start in range(0, len(views), batch_size)
            ]
        )
    finally:
        arch.set_caching(True)
    return probs.argmax(axis=1), probs
