"""
Compare several checkpoints on the same corpus split.
"""

from pathlib import Path

from glitchnet.checkpoints import load_checkpoint
from glitchnet.corpus import SPLITS, import_corpus
from glitchnet.evaluation import compare_reports, evaluate, rescued_samples
from glitchnet.management.base import GlitchnetCommand, translate_errors
from glitchnet.management.commands.eval import check_compatible


class Command(GlitchnetCommand):
    help = "Per-class accuracy of several models side by side, duration summaries and samples only multi-view models get right."

    def add_arguments(self, parser):
        parser.add_argument("--data", type=Path, required=True)
        parser.add_argument("--ckpt", type=Path, nargs="+", required=True)
        parser.add_argument("--split", choices=SPLITS, default="test")

    @translate_errors
    def handle(self, *args, data, ckpt, split, **options):
        corpus = import_corpus(data)
        evaluations, kinds = {}, {}
        for path in ckpt:
            arch = load_checkpoint(path).architecture()
            check_compatible(arch, corpus)
            name = arch.name if arch.name not in evaluations else f"{arch.name}@{path.stem}"
            evaluations[name] = evaluate(arch, corpus, split)
            kinds[name] = arch.spec.kind

        self.write_csv(compare_reports({n: e.report for n, e in evaluations.items()}).to_csv(
            index=False, float_format="%.6f", lineterminator="\n"))
        self.stdout.write("\nmodel,category,mean_class_accuracy")
        for name, evaluation in evaluations.items():
            for category, value in evaluation.report.duration_summary().items():
                self.stdout.write(f"{name},{category},{value:.6f}")

        single = [n for n, kind in kinds.items() if kind == "single"]
        multi = [n for n, kind in kinds.items() if kind != "single"]
        rescued = rescued_samples(evaluations, single, multi)
        self.stdout.write(f"\nrescued_by_multi_view,{len(rescued)}")
        for sample_id in rescued:
            self.stdout.write(sample_id)
