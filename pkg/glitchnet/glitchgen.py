"""
Deterministic synthetic glitch corpus.

Each sample is rendered once on a 4-second time-frequency canvas with the glitch centred at t = 0, then cut
into four views by windowing +-0.25, 0.5, 1.0 and 2.0 s around the centre and block-averaging every window
down to the same m x k view size.  Frequency runs up the image (row 0 is the highest frequency).

The canvas is 16k columns wide (4k columns per second), so the four windows are exactly 2k, 4k, 8k and
16k columns and reduce to k columns by factors of 2, 4, 8 and 16.

Short-duration classes keep their energy inside the 0.5 s window; long-duration classes spread it over
seconds, so the shortest view sees only a fraction of them.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np

from glitchnet.corpus import Corpus, stratified_split
from glitchnet.exceptions import ValidationError
from glitchnet.models import VIEW_SHAPE, MultiViewSample

logger = logging.getLogger(__name__)

CANVAS_SECONDS = 4.0
WINDOW_FACTORS = (2, 4, 8, 16)  # canvas columns per view column, per duration
MIN_PER_CLASS = 8
DEFAULT_NOISE_FLOOR = 0.05
EDGE_SECONDS = 0.01  # softness of component start / end
SPLIT_STREAM = 2**31  # seeds the split shuffle apart from per-sample (seed, class, index) streams

DurationCategory = Literal["short", "long"]
Grid = tuple[np.ndarray, np.ndarray]  # time (1 x W) and frequency (H x 1) coordinates


# -- component shapes.  Each maps (time, frequency, params) -> non-negative intensity on the canvas.


def _envelope(t: np.ndarray, half_duration: float, t0: float = 0.0) -> np.ndarray:
    """~1 inside [t0 - half_duration, t0 + half_duration], falling off smoothly outside."""
    return 1.0 / (1.0 + np.exp(-(half_duration - np.abs(t - t0)) / EDGE_SECONDS))


def _band(f: np.ndarray, f0: float, width: float) -> np.ndarray:
    return np.exp(-0.5 * ((f - f0) / width) ** 2)


def blob(t, f, p):
    """Time-localized Gaussian blob."""
    return p["amp"] * np.exp(-0.5 * (((t - p.get("t0", 0.0)) / p["sigma_t"]) ** 2 + ((f - p["f0"]) / p["sigma_f"]) ** 2))


def repeated_blobs(t, f, p):
    """``count`` blobs evenly spaced and centred on t0."""
    count = int(p["count"])
    offsets = (np.arange(count) - (count - 1) / 2) * p["spacing"]
    return sum(blob(t, f, {**p, "t0": p.get("t0", 0.0) + offset}) for offset in offsets)


def line(t, f, p):
    """Horizontal line at f0."""
    return p["amp"] * _band(f, p["f0"], p["width"]) * _envelope(t, p["half_duration"], p.get("t0", 0.0))


def low_band(t, f, p):
    """Band covering all frequencies below f_top."""
    return p["amp"] / (1.0 + np.exp((f - p["f_top"]) / 0.02)) * _envelope(t, p["half_duration"])


def arches(t, f, p):
    """Repeating arches peaking at t = 0, rising from f_base to f_top once per period."""
    track = p["f_base"] + (p["f_top"] - p["f_base"]) * np.abs(np.cos(np.pi * t / p["period"]))
    return p["amp"] * _band(f, track, p["thickness"]) * _envelope(t, p["half_duration"])


def wandering(t, f, p):
    """A thin track slowly wandering around f0."""
    track = p["f0"] + p["depth"] * np.sin(2 * np.pi * t / p["period"] + p["phase"])
    return p["amp"] * _band(f, track, p["thickness"]) * _envelope(t, p["half_duration"])


def burst(t, f, p):
    """Broadband burst between f_low and f_high."""
    in_band = 1.0 / (1.0 + np.exp((p["f_low"] - f) / 0.02)) / (1.0 + np.exp((f - p["f_high"]) / 0.02))
    return p["amp"] * in_band * _envelope(t, p["half_duration"])


def modulated_band(t, f, p):
    """Horizontal band whose intensity is modulated periodically in time."""
    modulation = 0.5 + 0.5 * np.cos(2 * np.pi * t / p["mod_period"])
    return line(t, f, p) * modulation


def chirp(t, f, p):
    """Track sweeping linearly from f_start to f_end across its duration."""
    t0, half = p.get("t0", 0.0), p["half_duration"]
    progress = np.clip((t - t0 + half) / (2 * half), 0.0, 1.0)
    track = p["f_start"] + (p["f_end"] - p["f_start"]) * progress
    return p["amp"] * _band(f, track, p["thickness"]) * _envelope(t, half, t0)


SHAPES: dict[str, Callable[[np.ndarray, np.ndarray, Mapping[str, float]], np.ndarray]] = {
    "blob": blob,
    "repeated_blobs": repeated_blobs,
    "line": line,
    "low_band": low_band,
    "arches": arches,
    "wandering": wandering,
    "burst": burst,
    "modulated_band": modulated_band,
    "chirp": chirp,
}

INTEGER_PARAMS = frozenset({"count"})


@dataclass(frozen=True)
class Component:
    """One morphological element: a shape name plus (low, high) ranges for its parameters."""

    shape: str
    ranges: Mapping[str, tuple[float, float]]

    def draw(self, rng: np.random.Generator) -> dict[str, float]:
        params = {}
        for key in sorted(self.ranges):
            low, high = self.ranges[key]
            params[key] = int(rng.integers(low, high + 1)) if key in INTEGER_PARAMS else float(rng.uniform(low, high))
        return params


@dataclass(frozen=True)
class GlitchClassSpec:
    name: str
    duration_category: DurationCategory
    components: tuple[Component, ...]
    noise_floor: float = DEFAULT_NOISE_FLOOR

    def __post_init__(self):
        if self.duration_category not in ("short", "long"):
            raise ValidationError(f"{self.name}: duration category must be 'short' or 'long'.")
        if not self.components:
            raise ValidationError(f"{self.name}: needs at least one component.")
        for component in self.components:
            if component.shape not in SHAPES:
                raise ValidationError(f"{self.name}: unknown component shape {component.shape!r}.")
            for key, (low, high) in component.ranges.items():
                if low > high:
                    raise ValidationError(f"{self.name}: empty range for {key}: ({low}, {high}).")
        if not 0 <= self.noise_floor < 1:
            raise ValidationError(f"{self.name}: noise floor must be in [0, 1).")


def _spec(name: str, category: DurationCategory, *components: tuple[str, dict]) -> GlitchClassSpec:
    return GlitchClassSpec(name, category, tuple(Component(shape, ranges) for shape, ranges in components))


AMP = (0.6, 1.0)
WHOLE = (2.0, 2.0)  # half-duration covering the whole canvas

DEFAULT_CLASS_SPECS: tuple[GlitchClassSpec, ...] = (
    # Named classes with their short / long category.
    _spec("Air Compressor", "short", ("blob", dict(f0=(0.05, 0.1), sigma_f=(0.02, 0.04), sigma_t=(0.04, 0.06), amp=AMP))),
    _spec("Blip", "short", ("blob", dict(f0=(0.4, 0.6), sigma_f=(0.15, 0.25), sigma_t=(0.01, 0.02), amp=AMP))),
    _spec(
        "Helix",
        "short",
        ("arches", dict(period=(0.05, 0.08), f_base=(0.28, 0.32), f_top=(0.6, 0.7), thickness=(0.02, 0.03),
                        half_duration=(0.1, 0.15), amp=AMP)),
    ),
    _spec("Power Line", "short", ("line", dict(f0=(0.3, 0.36), width=(0.01, 0.015), half_duration=(0.08, 0.15), amp=AMP))),
    _spec(
        "Repeating Blips",
        "short",
        ("repeated_blobs", dict(count=(3, 4), spacing=(0.07, 0.1), f0=(0.4, 0.6), sigma_f=(0.15, 0.2),
                                sigma_t=(0.01, 0.015), amp=AMP)),
    ),
    _spec("Tomte", "short", ("blob", dict(f0=(0.1, 0.2), sigma_f=(0.06, 0.1), sigma_t=(0.02, 0.04), amp=AMP))),
    _spec("Extremely Loud", "long", ("burst", dict(f_low=(0.0, 0.05), f_high=(0.9, 1.0), half_duration=(0.75, 1.5),
                                                  amp=AMP))),
    _spec(
        "Light Modulation",
        "long",
        ("modulated_band", dict(f0=(0.15, 0.25), width=(0.03, 0.05), mod_period=(0.2, 0.4), half_duration=(1.5, 2.0),
                                amp=AMP)),
    ),
    _spec(
        "Low Frequency Lines",
        "long",
        ("line", dict(f0=(0.05, 0.1), width=(0.01, 0.015), half_duration=WHOLE, amp=AMP)),
        ("line", dict(f0=(0.15, 0.2), width=(0.01, 0.015), half_duration=WHOLE, amp=AMP)),
    ),
    _spec(
        "Scattered Light",
        "long",
        ("arches", dict(period=(0.8, 1.4), f_base=(0.02, 0.04), f_top=(0.15, 0.3), thickness=(0.02, 0.03),
                        half_duration=(1.5, 2.0), amp=AMP)),
    ),
    _spec(
        "Wandering Line",
        "long",
        ("wandering", dict(f0=(0.62, 0.7), depth=(0.05, 0.08), period=(1.5, 3.0), phase=(0.0, 6.28),
                           thickness=(0.015, 0.02), half_duration=WHOLE, amp=AMP)),
    ),
    # Remaining classes built from the same shapes with their own parameter ranges.
    _spec("Koi Fish", "short", ("burst", dict(f_low=(0.05, 0.15), f_high=(0.6, 0.8), half_duration=(0.04, 0.08),
                                             amp=AMP))),
    _spec(
        "Chirp",
        "short",
        ("chirp", dict(f_start=(0.1, 0.2), f_end=(0.5, 0.7), half_duration=(0.08, 0.15), thickness=(0.02, 0.03),
                       amp=AMP)),
    ),
    _spec(
        "Whistle",
        "short",
        ("chirp", dict(f_start=(0.9, 0.98), f_end=(0.6, 0.7), half_duration=(0.1, 0.18), thickness=(0.015, 0.02),
                       amp=AMP)),
    ),
    _spec("Low Frequency Burst", "short", ("low_band", dict(f_top=(0.25, 0.35), half_duration=(0.12, 0.2), amp=AMP))),
    _spec(
        "Paired Doves",
        "long",
        ("chirp", dict(t0=(-0.7, -0.5), f_start=(0.2, 0.3), f_end=(0.45, 0.55), half_duration=(0.12, 0.18),
                       thickness=(0.02, 0.03), amp=AMP)),
        ("chirp", dict(t0=(0.5, 0.7), f_start=(0.45, 0.55), f_end=(0.2, 0.3), half_duration=(0.12, 0.18),
                       thickness=(0.02, 0.03), amp=AMP)),
    ),
    _spec("Violin Mode", "long", ("line", dict(f0=(0.85, 0.92), width=(0.01, 0.015), half_duration=WHOLE, amp=AMP))),
    _spec("1080 Lines", "long", ("line", dict(f0=(0.4, 0.46), width=(0.008, 0.012), half_duration=WHOLE, amp=AMP))),
    _spec(
        "1400 Ripples",
        "long",
        ("modulated_band", dict(f0=(0.7, 0.8), width=(0.015, 0.02), mod_period=(0.08, 0.15), half_duration=(1.5, 2.0),
                                amp=AMP)),
    ),
    _spec(
        "Scratchy",
        "long",
        ("repeated_blobs", dict(count=(9, 13), spacing=(0.2, 0.3), f0=(0.45, 0.6), sigma_f=(0.08, 0.12),
                                sigma_t=(0.03, 0.05), amp=AMP)),
    ),
)


def class_table(specs: Sequence[GlitchClassSpec] = DEFAULT_CLASS_SPECS) -> list[tuple[str, DurationCategory]]:
    return [(spec.name, spec.duration_category) for spec in specs]


def canvas_grid(view_shape: tuple[int, int] = VIEW_SHAPE) -> Grid:
    rows, cols = view_shape
    width = cols * WINDOW_FACTORS[-1]
    columns_per_second = width / CANVAS_SECONDS
    t = (np.arange(width) + 0.5) / columns_per_second - CANVAS_SECONDS / 2
    f = 1.0 - np.arange(rows) / (rows - 1)
    return t[np.newaxis, :], f[:, np.newaxis]


def window_columns(view_index: int, view_shape: tuple[int, int] = VIEW_SHAPE) -> slice:
    """Canvas column span of one view: the window of models.DURATIONS[view_index] seconds centred on t = 0."""
    cols = view_shape[1]
    width = cols * WINDOW_FACTORS[-1]
    span = cols * WINDOW_FACTORS[view_index]
    start = (width - span) // 2
    return slice(start, start + span)


def render_canvas(
    spec: GlitchClassSpec, rng: np.random.Generator, view_shape: tuple[int, int] = VIEW_SHAPE
) -> np.ndarray:
    """The noiseless glitch on the full 4-second canvas (rows x 16k columns)."""
    t, f = canvas_grid(view_shape)
    canvas = np.zeros((f.shape[0], t.shape[1]))
    for component in spec.components:
        canvas += SHAPES[component.shape](t, f, component.draw(rng))
    return canvas


def render_sample(
    spec: GlitchClassSpec,
    rng_seed: int | Sequence[int],
    label: int = 0,
    sample_id: str = "",
    view_shape: tuple[int, int] = VIEW_SHAPE,
) -> MultiViewSample:
    """Render one glitch and cut it into its four views; a pure function of (spec, rng_seed)."""
    rng = np.random.default_rng(np.random.SeedSequence(rng_seed))
    glitch = render_canvas(spec, rng, view_shape)
    peak = glitch.max()
    canvas = glitch + rng.uniform(0.0, spec.noise_floor * peak, size=glitch.shape)
    canvas /= canvas.max()
    rows, cols = view_shape
    views = np.stack(
        [
            canvas[:, window_columns(i, view_shape)].reshape(rows, cols, factor).mean(axis=2)
            for i, factor in enumerate(WINDOW_FACTORS)
        ]
    )
    return MultiViewSample(views=np.clip(views, 0.0, 1.0).astype(np.float32), label=label, sample_id=sample_id)


def generate_corpus(
    per_class: int = 40,
    seed: int = 0,
    class_specs: Sequence[GlitchClassSpec] = DEFAULT_CLASS_SPECS,
    view_shape: tuple[int, int] = VIEW_SHAPE,
) -> Corpus:
    """Uniformly balanced corpus with a stratified 75 / 12.5 / 12.5 split; a pure function of its arguments."""
    if per_class < MIN_PER_CLASS:
        raise ValidationError(f"per_class must be at least {MIN_PER_CLASS} so every split holds every class.")
    if len({spec.name for spec in class_specs}) != len(class_specs):
        raise ValidationError("Glitch class names must be unique.")
    samples = []
    for label, spec in enumerate(class_specs):
        logger.debug("rendering %d samples of %s", per_class, spec.name)
        samples.extend(
            render_sample(spec, (seed, label, index), label=label, sample_id=f"{label:02d}-{index:05d}",
                          view_shape=view_shape)
            for index in range(per_class)
        )
    split_rng = np.random.default_rng(np.random.SeedSequence((seed, SPLIT_STREAM)))
    splits = stratified_split([s.label for s in samples], split_rng)
    corpus = Corpus(
        samples=samples,
        splits=splits,
        class_names=tuple(spec.name for spec in class_specs),
        categories=tuple(spec.duration_category for spec in class_specs),
        seed=seed,
        per_class=per_class,
        view_shape=view_shape,
    )
    logger.info(
        "generated %d samples over %d classes (seed %d): %s",
        len(corpus),
        corpus.classes,
        seed,
        ", ".join(f"{name} {len(corpus.split(name))}" for name in ("train", "validation", "test")),
    )
    return corpus
