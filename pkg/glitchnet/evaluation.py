"""
Evaluation reports: overall and per-class accuracy, confusion matrices (rows = true class),
short / long duration summaries and cross-model comparisons.
"""

from __future__ import annotations

import io
import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np
import pandas as pd

from glitchnet.corpus import Corpus
from glitchnet.models import Architecture, predict

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalReport:
    confusion: pd.DataFrame  # C x C counts, index = true class, columns = predicted class
    categories: tuple[str, ...]

    @classmethod
    def from_predictions(
        cls, labels: Sequence[int], predicted: Sequence[int], class_names: Sequence[str], categories: Sequence[str]
    ) -> EvalReport:
        classes = range(len(class_names))
        confusion = pd.crosstab(
            pd.Categorical(np.asarray(labels), categories=classes),
            pd.Categorical(np.asarray(predicted), categories=classes),
            dropna=False,
        )
        confusion = confusion.reindex(index=classes, columns=classes, fill_value=0).astype(np.int64)
        confusion.index = pd.Index(class_names, name="true")
        confusion.columns = pd.Index(class_names, name="predicted")
        return cls(confusion=confusion, categories=tuple(categories))

    @property
    def class_names(self) -> list[str]:
        return list(self.confusion.index)

    @property
    def counts(self) -> pd.Series:
        return self.confusion.sum(axis=1)

    @property
    def correct(self) -> pd.Series:
        return pd.Series(np.diag(self.confusion.to_numpy()), index=self.confusion.index)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def overall_accuracy(self) -> float:
        return float(self.correct.sum() / self.total) if self.total else 0.0

    @property
    def per_class_accuracy(self) -> pd.Series:
        return (self.correct / self.counts.replace(0, np.nan)).fillna(0.0)

    def per_class_table(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "class": self.class_names,
                "duration_category": list(self.categories),
                "count": self.counts.to_numpy(),
                "correct": self.correct.to_numpy(),
                "accuracy": self.per_class_accuracy.to_numpy(),
            }
        )

    def duration_summary(self) -> dict[str, float]:
        """Unweighted mean per-class accuracy over the short and over the long duration classes."""
        table = self.per_class_table()
        return {
            category: float(table.loc[table.duration_category == category, "accuracy"].mean())
            for category in ("short", "long")
            if (table.duration_category == category).any()
        }

    def to_csv(self) -> str:
        """Overall metrics, the per-class table and the confusion matrix as three CSV blocks."""
        out = io.StringIO()
        summary = [("overall_accuracy", self.overall_accuracy), ("samples", self.total)]
        summary += [(f"{category}_mean_class_accuracy", value) for category, value in self.duration_summary().items()]
        pd.DataFrame(summary, columns=["metric", "value"]).to_csv(out, index=False, lineterminator="\n")
        out.write("\n")
        self.per_class_table().to_csv(out, index=False, float_format="%.6f", lineterminator="\n")
        out.write("\n")
        self.confusion.to_csv(out, index_label="true\\predicted", lineterminator="\n")
        return out.getvalue()


@dataclass(frozen=True)
class Evaluation:
    """An EvalReport plus the per-sample predictions behind it."""

    report: EvalReport
    sample_ids: tuple[str, ...]
    labels: np.ndarray
    predicted: np.ndarray
    posteriors: np.ndarray

    def misclassified(self) -> list[tuple[str, int, int]]:
        """(sample id, true label, predicted label) of every wrong prediction, in corpus order."""
        wrong = np.flatnonzero(self.labels != self.predicted)
        return [(self.sample_ids[i], int(self.labels[i]), int(self.predicted[i])) for i in wrong]

    def misclassified_csv(self, class_names: Sequence[str]) -> str:
        frame = pd.DataFrame(
            [(sid, class_names[t], class_names[p]) for sid, t, p in self.misclassified()],
            columns=["sample_id", "true_class", "predicted_class"],
        )
        return frame.to_csv(index=False, lineterminator="\n")


def evaluate(arch: Architecture, corpus: Corpus, split: str = "test", batch_size: int = 64) -> Evaluation:
    views, labels = corpus.arrays(split)
    predicted, posteriors = predict(arch, views, batch_size)
    report = EvalReport.from_predictions(labels, predicted, corpus.class_names, corpus.categories)
    logger.info("%s on %s split: accuracy %.4f over %d samples", arch.name, split, report.overall_accuracy,
                report.total)
    return Evaluation(
        report=report,
        sample_ids=tuple(s.sample_id for s in corpus.split(split)),
        labels=labels,
        predicted=predicted,
        posteriors=posteriors,
    )


def compare_reports(reports: Mapping[str, EvalReport]) -> pd.DataFrame:
    """One row per class (class, duration category, accuracy per model) followed by an overall row."""
    first = next(iter(reports.values()))
    table = pd.DataFrame({"class": first.class_names, "duration_category": list(first.categories)})
    for name, report in reports.items():
        table[name] = report.per_class_accuracy.to_numpy()
    overall = {"class": "overall", "duration_category": "", **{n: r.overall_accuracy for n, r in reports.items()}}
    return pd.concat([table, pd.DataFrame([overall])], ignore_index=True)


def rescued_samples(
    evaluations: Mapping[str, Evaluation], single_models: Sequence[str], multi_models: Sequence[str]
) -> list[str]:
    """Sample ids every single-view model gets wrong and every multi-view model gets right."""
    if not single_models or not multi_models:
        return []
    reference = evaluations[single_models[0]]
    wrong_everywhere = np.logical_and.reduce([evaluations[m].predicted != reference.labels for m in single_models])
    right_everywhere = np.logical_and.reduce([evaluations[m].predicted == reference.labels for m in multi_models])
    return [reference.sample_ids[i] for i in np.flatnonzero(wrong_everywhere & right_everywhere)]
