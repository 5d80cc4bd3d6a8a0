"""
Binary model checkpoints.

Layout (all integers little-endian)::

    b"MVG1"            magic
    uint32             format version
    uint32             header length in bytes
    header             UTF-8 JSON: architecture spec, training config echo, corpus seed,
                       tensor table [{name, shape}, ...] in storage order
    tensor data        each tensor as row-major float32 LE, in table order
"""

from __future__ import annotations

import json
import logging
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from glitchnet.exceptions import BuildError, CheckpointError, GlitchnetError
from glitchnet.models import Architecture, ModelSpec, build

logger = logging.getLogger(__name__)

MAGIC = b"MVG1"
VERSION = 1
PREAMBLE = struct.Struct("<4sII")
TENSOR_DTYPE = np.dtype("<f4")


@dataclass
class Checkpoint:
    spec: ModelSpec
    tensors: dict[str, np.ndarray]
    config: dict = field(default_factory=dict)
    corpus_seed: int | None = None
    version: int = VERSION

    def architecture(self, expected_model: str | None = None) -> Architecture:
        """Rebuild the architecture and load the stored parameters into it."""
        if expected_model is not None and expected_model != self.spec.name:
            raise CheckpointError(
                "architecture", f"architecture mismatch: checkpoint holds {self.spec.name}, expected {expected_model}."
            )
        try:
            arch = build(self.spec)
            arch.load_parameters(self.tensors)
        except (BuildError, ValueError) as e:
            raise CheckpointError("tensors", str(e)) from e
        return arch


def save_checkpoint(
    arch: Architecture, path: Path | str, config: dict | None = None, corpus_seed: int | None = None
) -> Path:
    path = Path(path)
    params = arch.parameters()
    header = {
        "architecture": arch.spec.to_dict(),
        "config": config or {},
        "corpus_seed": corpus_seed,
        "tensors": [{"name": name, "shape": list(value.shape)} for name, value in params.items()],
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(PREAMBLE.pack(MAGIC, VERSION, len(header_bytes)))
        f.write(header_bytes)
        for value in params.values():
            f.write(np.ascontiguousarray(value, dtype=TENSOR_DTYPE).tobytes())
    logger.debug("saved %s checkpoint (%d tensors) to %s", arch.name, len(params), path)
    return path


def load_checkpoint(path: Path | str) -> Checkpoint:
    raw = Path(path).read_bytes()
    if len(raw) < PREAMBLE.size:
        raise CheckpointError("magic", "bad magic (file too short).")
    magic, version, header_length = PREAMBLE.unpack_from(raw)
    if magic != MAGIC:
        raise CheckpointError("magic", f"bad magic {magic!r}.")
    if version != VERSION:
        raise CheckpointError("version", f"version mismatch: file has {version}, reader supports {VERSION}.")
    try:
        header = json.loads(raw[PREAMBLE.size : PREAMBLE.size + header_length].decode("utf-8"))
        spec = ModelSpec.from_dict(header["architecture"])
        table = [(entry["name"], tuple(entry["shape"])) for entry in header["tensors"]]
    except (ValueError, KeyError, TypeError, GlitchnetError) as e:
        raise CheckpointError("header", f"malformed header ({e}).") from e

    tensors, offset = {}, PREAMBLE.size + header_length
    for name, shape in table:
        size = math.prod(shape) * TENSOR_DTYPE.itemsize
        if offset + size > len(raw):
            raise CheckpointError(name, f"truncated tensor data (needs {size} bytes at offset {offset}).")
        tensors[name] = np.frombuffer(raw, dtype=TENSOR_DTYPE, count=math.prod(shape), offset=offset).reshape(shape)
        offset += size
    if offset != len(raw):
        raise CheckpointError("tensors", f"{len(raw) - offset} unexpected trailing bytes.")
    logger.debug("loaded %s checkpoint from %s", spec.name, path)
    return Checkpoint(
        spec=spec,
        tensors=tensors,
        config=header.get("config", {}),
        corpus_seed=header.get("corpus_seed"),
        version=version,
    )
