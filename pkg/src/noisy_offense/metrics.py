"""Evaluation arithmetic: confusion matrix, per-class P/R/F1, macro averages.

Conventions: precision or recall with a zero denominator is defined as 0,
and F1 is 0 when precision + recall is 0 (keeps macro averages total).
Macro values are unweighted means over the two classes. Tables render
with four decimal places; missing cells render as ``-``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import NOT, OFF, GoldRecord
from .classifier import Prediction
from .errors import DataError


@dataclass(frozen=True)
class ConfusionMatrix:
    """2x2 gold-by-predicted counts over {OFF, NOT}."""

    off_off: int = 0  # gold OFF, predicted OFF
    off_not: int = 0  # gold OFF, predicted NOT (false negatives)
    not_off: int = 0  # gold NOT, predicted OFF (false positives)
    not_not: int = 0  # gold NOT, predicted NOT

    def __post_init__(self):
        if min(self.off_off, self.off_not, self.not_off, self.not_not) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.off_off + self.off_not + self.not_off + self.not_not

    def count(self, gold: str, predicted: str) -> int:
        return {
            (OFF, OFF): self.off_off,
            (OFF, NOT): self.off_not,
            (NOT, OFF): self.not_off,
            (NOT, NOT): self.not_not,
        }[(gold, predicted)]

    def to_tsv(self) -> str:
        """2x2 TSV with gold labels on rows and predictions on columns."""
        return (
            "gold\\pred\tOFF\tNOT\n"
            f"OFF\t{self.off_off}\t{self.off_not}\n"
            f"NOT\t{self.not_off}\t{self.not_not}\n"
        )


def confusion(gold: Sequence[GoldRecord], preds: Sequence[Prediction]) -> ConfusionMatrix:
    """Tally gold/predicted label pairs; id sets must match exactly."""
    by_id = {}
    for pred in preds:
        if pred.id in by_id:
            raise DataError(f"duplicate prediction id {pred.id!r}")
        by_id[pred.id] = pred.label
    gold_ids = {rec.id for rec in gold}
    if len(gold_ids) != len(gold):
        raise DataError("duplicate gold ids")
    missing = sorted(gold_ids - by_id.keys())
    extra = sorted(by_id.keys() - gold_ids)
    if missing or extra:
        parts = []
        if missing:
            parts.append(f"missing predictions for: {', '.join(missing)}")
        if extra:
            parts.append(f"predictions for unknown ids: {', '.join(extra)}")
        raise DataError("; ".join(parts))

    counts = {(OFF, OFF): 0, (OFF, NOT): 0, (NOT, OFF): 0, (NOT, NOT): 0}
    for rec in gold:
        counts[(rec.label, by_id[rec.id])] += 1
    return ConfusionMatrix(
        off_off=counts[(OFF, OFF)],
        off_not=counts[(OFF, NOT)],
        not_off=counts[(NOT, OFF)],
        not_not=counts[(NOT, NOT)],
    )


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _ratio(numerator: int, denominator: int) -> float:
    return numerator / denominator if denominator else 0.0


@dataclass(frozen=True)
class MacroScores:
    """Macro-averaged metrics; None marks a value a system never reported."""

    precision: float | None
    recall: float | None
    f1: float | None


@dataclass(frozen=True)
class ClassMetrics:
    """Per-class precision/recall/F1 plus their macro averages."""

    precision_off: float
    recall_off: float
    f1_off: float
    precision_not: float
    recall_not: float
    f1_not: float
    macro_precision: float
    macro_recall: float
    macro_f1: float

    @classmethod
    def from_precision_recall(
        cls, precision_off: float, recall_off: float, precision_not: float, recall_not: float
    ) -> ClassMetrics:
        f1_off = f1_score(precision_off, recall_off)
        f1_not = f1_score(precision_not, recall_not)
        return cls(
            precision_off=precision_off,
            recall_off=recall_off,
            f1_off=f1_off,
            precision_not=precision_not,
            recall_not=recall_not,
            f1_not=f1_not,
            macro_precision=(precision_off + precision_not) / 2.0,
            macro_recall=(recall_off + recall_not) / 2.0,
            macro_f1=(f1_off + f1_not) / 2.0,
        )

    @property
    def macro(self) -> MacroScores:
        return MacroScores(self.macro_precision, self.macro_recall, self.macro_f1)


def class_metrics(cm: ConfusionMatrix) -> ClassMetrics:
    """Derive all per-class and macro metrics from a confusion matrix."""
    if cm.total == 0:
        raise DataError("cannot compute metrics over an empty confusion matrix")
    return ClassMetrics.from_precision_recall(
        precision_off=_ratio(cm.off_off, cm.off_off + cm.not_off),
        recall_off=_ratio(cm.off_off, cm.off_off + cm.off_not),
        precision_not=_ratio(cm.not_not, cm.not_not + cm.off_not),
        recall_not=_ratio(cm.not_not, cm.not_not + cm.not_off),
    )


def _cell(value: float | None) -> str:
    return "-" if value is None else f"{value:.4f}"


def benchmark_table(rows: Sequence[tuple[str, MacroScores]]) -> str:
    """Render a systems-comparison table of macro precision/recall/F1."""
    if not rows:
        raise DataError("benchmark table needs at least one row")
    headers = ("Systems", "Precision", "Recall", "F1-Score")
    name_width = max(len(headers[0]), max(len(name) for name, _ in rows))
    lines = [
        f"{headers[0]:<{name_width}}  {headers[1]:>9}  {headers[2]:>9}  {headers[3]:>9}"
    ]
    for name, scores in rows:
        lines.append(
            f"{name:<{name_width}}  {_cell(scores.precision):>9}  "
            f"{_cell(scores.recall):>9}  {_cell(scores.f1):>9}"
        )
    return "\n".join(lines) + "\n"


def format_metrics(metrics: ClassMetrics) -> str:
    """Key-value block plus the per-class table emitted by the CLI."""
    lines = [
        f"precision_off\t{metrics.precision_off:.4f}",
        f"recall_off\t{metrics.recall_off:.4f}",
        f"f1_off\t{metrics.f1_off:.4f}",
        f"precision_not\t{metrics.precision_not:.4f}",
        f"recall_not\t{metrics.recall_not:.4f}",
        f"f1_not\t{metrics.f1_not:.4f}",
        f"macro_precision\t{metrics.macro_precision:.4f}",
        f"macro_recall\t{metrics.macro_recall:.4f}",
        f"macro_f1\t{metrics.macro_f1:.4f}",
    ]
    return "\n".join(lines) + "\n"


def write_confusion_tsv(cm: ConfusionMatrix, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(cm.to_tsv())
