"""
Multi-view glitch corpora: the in-memory type, its stratified train / validation / test split,
and the on-disk directory format.

Directory layout::

    corpus.json     seed, per-class count, view shape, class names and duration categories
    manifest.csv    one record per sample: id, label, class name, category, split, four view paths
    views/*.glv     one file per view: b"GLV1", rows, cols (uint32 LE), rows*cols float32 LE, row-major
"""

from __future__ import annotations

import csv
import json
import logging
import struct
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from glitchnet.exceptions import CorpusIOError, ValidationError
from glitchnet.models import DURATIONS, VIEW_COUNT, MultiViewSample, pixels_in_range

logger = logging.getLogger(__name__)

SPLITS = ("train", "validation", "test")
SPLIT_FRACTIONS = (0.75, 0.125, 0.125)

VIEW_MAGIC = b"GLV1"
VIEW_HEADER = struct.Struct("<4sII")
VIEW_DTYPE = np.dtype("<f4")

MANIFEST = "manifest.csv"
METADATA = "corpus.json"
VIEW_DIR = "views"
VIEW_COLUMNS = tuple(f"view_{d}s" for d in DURATIONS)
MANIFEST_FIELDS = ("sample_id", "label", "class_name", "duration_category", "split", *VIEW_COLUMNS)


@dataclass
class Corpus:
    samples: list[MultiViewSample]
    splits: list[str]  # parallel to samples
    class_names: tuple[str, ...]
    categories: tuple[str, ...]  # "short" / "long" per class
    seed: int | None = None
    per_class: int | None = None
    view_shape: tuple[int, int] = field(default=(47, 57))

    def __post_init__(self):
        if len(self.samples) != len(self.splits):
            raise ValidationError(f"{len(self.samples)} samples but {len(self.splits)} split assignments.")
        unknown = set(self.splits) - set(SPLITS)
        if unknown:
            raise ValidationError(f"Unknown split names: {sorted(unknown)}.")
        if len(self.class_names) != len(self.categories):
            raise ValidationError("Every class needs a duration category.")
        self.class_names, self.categories = tuple(self.class_names), tuple(self.categories)
        self.view_shape = tuple(self.view_shape)

    def __len__(self):
        return len(self.samples)

    @property
    def classes(self) -> int:
        return len(self.class_names)

    def split(self, name: str) -> list[MultiViewSample]:
        if name not in SPLITS:
            raise ValidationError(f"Unknown split {name!r}; expected one of {', '.join(SPLITS)}.")
        return [s for s, split in zip(self.samples, self.splits) if split == name]

    def arrays(self, name: str) -> tuple[np.ndarray, np.ndarray]:
        """Views stacked as N x 4 x m x k and labels as N for one split."""
        samples = self.split(name)
        if not samples:
            return np.empty((0, VIEW_COUNT, *self.view_shape), dtype=np.float32), np.empty(0, dtype=np.int64)
        return np.stack([s.views for s in samples]), np.array([s.label for s in samples], dtype=np.int64)

    def class_histogram(self, name: str) -> np.ndarray:
        return np.bincount([s.label for s in self.split(name)], minlength=self.classes)


def split_sizes(n: int) -> tuple[int, int, int]:
    """Train / validation / test sizes for one class of n samples."""
    n_train = round(n * SPLIT_FRACTIONS[0])
    n_validation = round(n * SPLIT_FRACTIONS[1])
    return n_train, n_validation, n - n_train - n_validation


def stratified_split(labels: Sequence[int], rng: np.random.Generator) -> list[str]:
    """Assign each sample a split so every class is divided 75 / 12.5 / 12.5."""
    labels = np.asarray(labels)
    assignment = [""] * len(labels)
    for label in np.unique(labels):
        members = rng.permutation(np.flatnonzero(labels == label))
        n_train, n_validation, _ = split_sizes(len(members))
        for rank, index in enumerate(members):
            if rank < n_train:
                assignment[index] = "train"
            elif rank < n_train + n_validation:
                assignment[index] = "validation"
            else:
                assignment[index] = "test"
    return assignment


# -- view files


def write_view(path: Path, view: np.ndarray):
    rows, cols = view.shape
    with open(path, "wb") as f:
        f.write(VIEW_HEADER.pack(VIEW_MAGIC, rows, cols))
        f.write(np.ascontiguousarray(view, dtype=VIEW_DTYPE).tobytes())


def read_view(path: Path, expected_shape: tuple[int, int] | None = None) -> np.ndarray:
    """Read one view file; every defect is reported as a CorpusIOError naming the file."""
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise CorpusIOError(path, f"cannot read view file ({e.strerror or e}).") from e
    if len(raw) < VIEW_HEADER.size:
        raise CorpusIOError(path, "truncated view header.")
    magic, rows, cols = VIEW_HEADER.unpack_from(raw)
    if magic != VIEW_MAGIC:
        raise CorpusIOError(path, f"bad magic {magic!r}.")
    if rows < 1 or cols < 1:
        raise CorpusIOError(path, f"invalid view size {rows}x{cols}.")
    expected_bytes = rows * cols * VIEW_DTYPE.itemsize
    if len(raw) - VIEW_HEADER.size != expected_bytes:
        raise CorpusIOError(path, f"expected {expected_bytes} data bytes, found {len(raw) - VIEW_HEADER.size}.")
    if expected_shape is not None and (rows, cols) != tuple(expected_shape):
        raise CorpusIOError(path, f"view is {rows}x{cols}, expected {expected_shape[0]}x{expected_shape[1]}.")
    view = np.frombuffer(raw, dtype=VIEW_DTYPE, offset=VIEW_HEADER.size).reshape(rows, cols).astype(np.float32)
    if not pixels_in_range(view):
        raise CorpusIOError(path, "pixel values outside [0, 1].")
    return view


def read_sample_views(paths: Sequence[Path], expected_shape: tuple[int, int] | None = None) -> np.ndarray:
    """Four view files (0.5 s .. 4 s) as one 4 x m x k array, optionally of a required view shape."""
    views = [read_view(p, expected_shape) for p in paths]
    shapes = {v.shape for v in views}
    if len(shapes) != 1:
        raise CorpusIOError(paths[0], f"views of one sample have different shapes {sorted(shapes)}.")
    return np.stack(views)


# -- corpus directories


def view_path(sample: MultiViewSample, view_index: int) -> str:
    return f"{VIEW_DIR}/{sample.sample_id}_{DURATIONS[view_index]}s.glv"


def export_corpus(corpus: Corpus, directory: Path | str) -> Path:
    """Write the corpus directory; returns the manifest path."""
    directory = Path(directory)
    try:
        (directory / VIEW_DIR).mkdir(parents=True, exist_ok=True)
        metadata = {
            "format": 1,
            "seed": corpus.seed,
            "per_class": corpus.per_class,
            "view_shape": list(corpus.view_shape),
            "classes": [
                {"name": name, "duration_category": category}
                for name, category in zip(corpus.class_names, corpus.categories)
            ],
        }
        (directory / METADATA).write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        manifest = directory / MANIFEST
        with open(manifest, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(MANIFEST_FIELDS)
            for sample, split in zip(corpus.samples, corpus.splits):
                paths = [view_path(sample, i) for i in range(VIEW_COUNT)]
                for i, relative in enumerate(paths):
                    write_view(directory / relative, sample.views[i])
                writer.writerow(
                    [
                        sample.sample_id,
                        sample.label,
                        corpus.class_names[sample.label],
                        corpus.categories[sample.label],
                        split,
                        *paths,
                    ]
                )
    except OSError as e:
        raise CorpusIOError(getattr(e, "filename", None) or directory, f"cannot write corpus ({e.strerror or e}).") from e
    logger.info("exported %d samples to %s", len(corpus), directory)
    return manifest


def _load_metadata(directory: Path) -> dict:
    path = directory / METADATA
    try:
        metadata = json.loads(path.read_text(encoding="utf-8"))
        classes = metadata["classes"]
        metadata["class_names"] = tuple(c["name"] for c in classes)
        metadata["categories"] = tuple(c["duration_category"] for c in classes)
        metadata["view_shape"] = tuple(metadata["view_shape"])
    except OSError as e:
        raise CorpusIOError(path, f"cannot read corpus metadata ({e.strerror or e}).") from e
    except (ValueError, KeyError, TypeError) as e:
        raise CorpusIOError(path, f"malformed corpus metadata ({e}).") from e
    return metadata


def import_corpus(directory: Path | str) -> Corpus:
    directory = Path(directory)
    metadata = _load_metadata(directory)
    class_names = metadata["class_names"]
    manifest = directory / MANIFEST
    samples, splits = [], []
    try:
        with open(manifest, newline="", encoding="utf-8") as f:
            reader = csv.DictReader(f)
            if tuple(reader.fieldnames or ()) != MANIFEST_FIELDS:
                raise CorpusIOError(manifest, f"malformed manifest header {reader.fieldnames}.")
            for line, record in enumerate(reader, start=2):
                try:
                    label = int(record["label"])
                    if class_names[label] != record["class_name"] or label < 0:
                        raise ValueError(f"label {label} does not name class {record['class_name']!r}")
                    paths = [directory / record[column] for column in VIEW_COLUMNS]
                except (ValueError, TypeError, IndexError) as e:
                    raise CorpusIOError(manifest, f"malformed record on line {line} ({e}).") from e
                views = np.stack([read_view(p, metadata["view_shape"]) for p in paths])
                samples.append(MultiViewSample(views=views, label=label, sample_id=record["sample_id"]))
                splits.append(record["split"])
    except OSError as e:
        if isinstance(e, CorpusIOError):
            raise
        raise CorpusIOError(manifest, f"cannot read manifest ({e.strerror or e}).") from e
    logger.debug("imported %d samples from %s", len(samples), directory)
    try:
        return Corpus(
            samples=samples,
            splits=splits,
            class_names=class_names,
            categories=metadata["categories"],
            seed=metadata.get("seed"),
            per_class=metadata.get("per_class"),
            view_shape=metadata["view_shape"],
        )
    except ValidationError as e:
        raise CorpusIOError(manifest, str(e)) from e
