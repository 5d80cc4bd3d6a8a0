"""
Train one architecture on a corpus directory and save its best checkpoint.
"""

from pathlib import Path

from glitchnet import settings as app_settings
from glitchnet import tensor
from glitchnet.checkpoints import save_checkpoint
from glitchnet.corpus import import_corpus
from glitchnet.management.base import GlitchnetCommand, translate_errors
from glitchnet.models import MODEL_NAMES, ModelSpec, build
from glitchnet.training import CSV_HEADER, train


class Command(GlitchnetCommand):
    help = "Train a glitch classifier with Adadelta and keep the epoch with the best validation accuracy."

    def add_arguments(self, parser):
        parser.add_argument("--data", type=Path, required=True, help="Corpus directory.")
        parser.add_argument("--model", choices=MODEL_NAMES, required=True)
        parser.add_argument("--epochs", type=int, default=app_settings.GLITCHNET_EPOCHS)
        parser.add_argument("--batch", type=int, default=app_settings.GLITCHNET_BATCH_SIZE)
        parser.add_argument("--seed", type=int, default=0, help="Seeds initialisation and batch shuffling.")
        parser.add_argument("--out", type=Path, required=True, help="Checkpoint file to write.")
        parser.add_argument("--log", type=Path, default=None, help="Per-epoch CSV log (default: stdout).")
        parser.add_argument("--reduction", choices=("sum", "mean"), default=app_settings.GLITCHNET_LOSS_REDUCTION)

    @translate_errors
    def handle(self, *args, data, model, epochs, batch, seed, out, log, reduction, **options):
        corpus = import_corpus(data)
        spec = ModelSpec.from_name(model, view_shape=corpus.view_shape, classes=corpus.classes)
        arch = build(spec, seed=seed)
        with self.csv_stream(log) as write:
            write(CSV_HEADER)
            report = train(
                arch,
                corpus,
                epochs=epochs,
                batch_size=batch,
                seed=seed,
                rho=app_settings.GLITCHNET_ADADELTA_RHO,
                eps=app_settings.GLITCHNET_ADADELTA_EPS,
                reduction=reduction,
                on_epoch=lambda record: write(record.csv_row()),
            )
        config = {
            "model": model,
            "epochs": epochs,
            "batch_size": batch,
            "seed": seed,
            "reduction": reduction,
            "precision": tensor.precision_name(),
            "adadelta_rho": app_settings.GLITCHNET_ADADELTA_RHO,
            "adadelta_eps": app_settings.GLITCHNET_ADADELTA_EPS,
            "best_epoch": report.best_epoch,
            "class_names": list(corpus.class_names),
        }
        save_checkpoint(arch, out, config=config, corpus_seed=corpus.seed)
