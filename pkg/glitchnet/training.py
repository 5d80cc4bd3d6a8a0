"""
Mini-batch Adadelta training with validation-based model selection.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import asdict, dataclass, field

import numpy as np
import pandas as pd

from glitchnet.corpus import Corpus
from glitchnet.exceptions import ValidationError
from glitchnet.losses import Reduction, cross_entropy, one_hot, softmax_xent_grad
from glitchnet.models import Architecture, predict
from glitchnet.optim import DEFAULT_EPS, DEFAULT_RHO, Adadelta

logger = logging.getLogger(__name__)

DEFAULT_EPOCHS = 130
DEFAULT_BATCH_SIZE = 30


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float  # mean per-sample cross-entropy over the epoch's mini-batches
    validation_loss: float
    validation_accuracy: float

    def csv_row(self, float_format: str = "%.6f") -> str:
        """One line of the per-epoch CSV, formatted as TrainingReport.to_csv formats it."""
        losses = (self.train_loss, self.validation_loss, self.validation_accuracy)
        return ",".join([str(self.epoch), *(float_format % value for value in losses)]) + "\n"


CSV_HEADER = ",".join(EpochRecord.__annotations__) + "\n"


@dataclass
class TrainingReport:
    model: str
    seed: int
    initial_loss: float  # mean per-sample training loss before the first update
    epochs: list[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0
    best_parameters: dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def best(self) -> EpochRecord:
        return self.epochs[self.best_epoch - 1]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(record) for record in self.epochs], columns=list(EpochRecord.__annotations__))

    def to_csv(self, path_or_buffer=None, float_format: str = "%.6f"):
        return self.to_frame().to_csv(path_or_buffer, index=False, float_format=float_format, lineterminator="\n")


def _is_better(record: EpochRecord, best: EpochRecord | None) -> bool:
    if best is None or record.validation_accuracy > best.validation_accuracy:
        return True
    return record.validation_accuracy == best.validation_accuracy and record.validation_loss < best.validation_loss


def evaluate_loss(arch: Architecture, views: np.ndarray, labels: np.ndarray, batch_size: int) -> tuple[float, float]:
    """Mean per-sample loss and accuracy of the current parameters."""
    predicted, probs = predict(arch, views, batch_size)
    loss = cross_entropy(probs, one_hot(labels, arch.spec.classes)).value / len(labels)
    return loss, float(np.mean(predicted == labels))


def train(
    arch: Architecture,
    corpus: Corpus,
    epochs: int = DEFAULT_EPOCHS,
    batch_size: int = DEFAULT_BATCH_SIZE,
    seed: int = 0,
    rho: float = DEFAULT_RHO,
    eps: float = DEFAULT_EPS,
    reduction: Reduction = "sum",
    restore_best: bool = True,
    on_epoch: Callable[[EpochRecord], None] | None = None,
) -> TrainingReport:
    """
    Train on the corpus's train split, selecting the epoch with the best validation accuracy
    (ties to lower validation loss).  Batches are reshuffled every epoch from ``seed``; the last
    partial batch is kept.  With ``restore_best`` the architecture ends holding the selected parameters.
    ``on_epoch`` receives each EpochRecord as soon as its validation pass finishes.
    """
    if epochs < 1 or batch_size < 1:
        raise ValidationError(f"epochs and batch size must be positive, got {epochs} and {batch_size}.")
    train_views, train_labels = corpus.arrays("train")
    val_views, val_labels = corpus.arrays("validation")
    if len(train_labels) == 0 or len(val_labels) == 0:
        raise ValidationError("Training needs non-empty train and validation splits.")
    if corpus.classes != arch.spec.classes:
        raise ValidationError(f"{arch.name} predicts {arch.spec.classes} classes, corpus has {corpus.classes}.")

    rng = np.random.default_rng(seed)
    optimizer = Adadelta(rho=rho, eps=eps)
    initial_loss, _ = evaluate_loss(arch, train_views, train_labels, batch_size)
    report = TrainingReport(model=arch.name, seed=seed, initial_loss=initial_loss)
    logger.info("training %s on %d samples, %d epochs, initial loss %.4f", arch.name, len(train_labels), epochs,
                initial_loss)

    best = None
    for epoch in range(1, epochs + 1):
        order = rng.permutation(len(train_labels))
        epoch_loss = 0.0
        for start in range(0, len(order), batch_size):
            batch = order[start : start + batch_size]
            labels = one_hot(train_labels[batch], arch.spec.classes)
            probs = arch.forward_inputs(arch.prepare_inputs(train_views[batch]))
            epoch_loss += cross_entropy(probs, labels).value
            arch.backward(softmax_xent_grad(probs, labels, reduction), from_logits=True)
            optimizer.step(arch.parameters(), arch.gradients())

        val_loss, val_accuracy = evaluate_loss(arch, val_views, val_labels, batch_size)
        record = EpochRecord(epoch, epoch_loss / len(order), val_loss, val_accuracy)
        report.epochs.append(record)
        improved = _is_better(record, best)
        if improved:
            best, report.best_epoch, report.best_parameters = record, epoch, arch.snapshot()
        logger.info(
            "%s epoch %d/%d: train loss %.4f, validation loss %.4f, validation accuracy %.4f%s",
            arch.name, epoch, epochs, record.train_loss, val_loss, val_accuracy, " *" if improved else "",
        )
        if on_epoch:
            on_epoch(record)

    if restore_best:
        arch.load_parameters(report.best_parameters)
    return report
