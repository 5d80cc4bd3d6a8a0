"""
Classify individual samples given their view files.
"""

import io
from pathlib import Path

import numpy as np
import pandas as pd
from django.core.management.base import CommandError

from glitchnet.checkpoints import load_checkpoint
from glitchnet.corpus import read_sample_views, read_view
from glitchnet.management.base import GlitchnetCommand, translate_errors
from glitchnet.models import VIEW_COUNT, predict


class Command(GlitchnetCommand):
    help = "Predict the glitch class of each --sample (four view files, or one file for single-view models)."

    def add_arguments(self, parser):
        parser.add_argument("--ckpt", type=Path, required=True)
        parser.add_argument(
            "--sample",
            type=Path,
            nargs="+",
            action="append",
            required=True,
            help="View files of one sample, ordered 0.5 s, 1 s, 2 s, 4 s; repeat for more samples.",
        )

    def sample_views(self, arch, paths: list[Path]) -> np.ndarray:
        """A 4 x m x k view stack; a lone file fills the single-view model's own duration slot."""
        if len(paths) == VIEW_COUNT:
            return read_sample_views(paths, arch.spec.view_shape)
        if len(paths) == 1 and arch.spec.kind == "single":
            views = np.zeros((VIEW_COUNT, *arch.spec.view_shape), dtype=np.float32)
            views[arch.spec.duration_index] = read_view(paths[0], arch.spec.view_shape)
            return views
        raise CommandError(f"{arch.name} needs {VIEW_COUNT} view files per sample, got {len(paths)}.")

    @translate_errors
    def handle(self, *args, ckpt, sample, **options):
        checkpoint = load_checkpoint(ckpt)
        arch = checkpoint.architecture()
        class_names = checkpoint.config.get("class_names") or [f"class{i}" for i in range(arch.spec.classes)]
        views = np.stack([self.sample_views(arch, paths) for paths in sample])
        predicted, posteriors = predict(arch, views)
        frame = pd.DataFrame(posteriors, columns=list(class_names))
        frame.insert(0, "predicted_class", [class_names[p] for p in predicted])
        frame.insert(0, "sample", [str(paths[0]) for paths in sample])
        out = io.StringIO()
        frame.to_csv(out, index=False, float_format="%.6f", lineterminator="\n")
        self.write_csv(out.getvalue())
