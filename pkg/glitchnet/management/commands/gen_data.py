"""
Generate a synthetic multi-view glitch corpus directory.
"""

from dataclasses import replace
from pathlib import Path

from glitchnet import settings as app_settings
from glitchnet.corpus import export_corpus
from glitchnet.glitchgen import generate_corpus
from glitchnet.management.base import GlitchnetCommand, translate_errors
from glitchnet.utils import paper_scale_per_class, resolve_import


class Command(GlitchnetCommand):
    help = "Generate a synthetic, stratified glitch corpus and print its manifest."

    def add_arguments(self, parser):
        parser.add_argument("--out", type=Path, required=True, help="Corpus directory to create.")
        parser.add_argument("--per-class", type=int, default=None, help="Samples per class (overrides --scale).")
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--scale", choices=("desk", "paper"), default="desk")

    @translate_errors
    def handle(self, *args, out, per_class, seed, scale, **options):
        class_specs = list(resolve_import(app_settings.GLITCHNET_CLASS_SPECS))
        if app_settings.GLITCHNET_NOISE_FLOOR is not None:
            class_specs = [replace(spec, noise_floor=app_settings.GLITCHNET_NOISE_FLOOR) for spec in class_specs]
        if per_class is None:
            per_class = (
                paper_scale_per_class(app_settings.GLITCHNET_PAPER_TOTAL, len(class_specs))
                if scale == "paper"
                else app_settings.GLITCHNET_DESK_PER_CLASS
            )
        corpus = generate_corpus(per_class, seed, class_specs, app_settings.GLITCHNET_VIEW_SHAPE)
        manifest = export_corpus(corpus, out)
        self.stdout.write(manifest.read_text(encoding="utf-8"), ending="")
        if scale == "paper":
            delta = app_settings.GLITCHNET_PAPER_TOTAL - len(corpus)
            self.stderr.write(
                f"paper scale: {len(corpus)} samples ({per_class} per class), "
                f"{delta} fewer than the {app_settings.GLITCHNET_PAPER_TOTAL} of the reference corpus."
            )
