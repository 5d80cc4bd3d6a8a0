"""
Evaluate a checkpoint on one split of a corpus directory.
"""

from pathlib import Path

from glitchnet.checkpoints import load_checkpoint
from glitchnet.corpus import SPLITS, import_corpus
from glitchnet.evaluation import evaluate
from glitchnet.exceptions import ValidationError
from glitchnet.management.base import GlitchnetCommand, translate_errors


def check_compatible(arch, corpus):
    if arch.spec.view_shape != corpus.view_shape:
        raise ValidationError(f"{arch.name} was built for views {arch.spec.view_shape}, corpus has {corpus.view_shape}.")
    if arch.spec.classes != corpus.classes:
        raise ValidationError(f"{arch.name} predicts {arch.spec.classes} classes, corpus has {corpus.classes}.")


class Command(GlitchnetCommand):
    help = "Report overall accuracy, per-class accuracy and the confusion matrix of a checkpoint."

    def add_arguments(self, parser):
        parser.add_argument("--ckpt", type=Path, required=True)
        parser.add_argument("--data", type=Path, required=True)
        parser.add_argument("--split", choices=SPLITS, default="test")
        parser.add_argument("--misclassified", action="store_true", help="Also list every misclassified sample.")

    @translate_errors
    def handle(self, *args, ckpt, data, split, misclassified, **options):
        arch = load_checkpoint(ckpt).architecture()
        corpus = import_corpus(data)
        check_compatible(arch, corpus)
        evaluation = evaluate(arch, corpus, split)
        self.write_csv(evaluation.report.to_csv())
        if misclassified:
            self.stdout.write("")
            self.write_csv(evaluation.misclassified_csv(corpus.class_names))
