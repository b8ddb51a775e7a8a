"""Confusion matrices and classification metrics.

Rows of the confusion matrix are true classes, columns are predictions.
Per-class precision/recall/F1 use a zero-denominator-means-zero convention;
macro aggregates are unweighted class means.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError


@dataclass
class ConfusionMatrix:
    counts: np.ndarray

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass
class EvaluationReport:
    """All headline metrics for one classifier evaluation."""

    confusion: ConfusionMatrix
    accuracy: float
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    macro_precision: float
    macro_recall: float
    macro_f1: float
    metadata: dict = field(default_factory=dict)


def confusion(y_true, y_pred, n_classes: int) -> ConfusionMatrix:
    """Count matrix with counts[t][p] = #{i : y_true[i]=t, y_pred[i]=p}."""
    y_true = np.asarray(y_true, dtype=np.int64).ravel()
    y_pred = np.asarray(y_pred, dtype=np.int64).ravel()
    if y_true.shape != y_pred.shape:
        raise ShapeError(
            f"label arrays differ in length: {y_true.shape[0]} vs {y_pred.shape[0]}")
    if n_classes < 1:
        raise ShapeError(f"n_classes must be >= 1, got {n_classes}")
    for name, arr in (("y_true", y_true), ("y_pred", y_pred)):
        if arr.size and (arr.min() < 0 or arr.max() >= n_classes):
            raise ShapeError(f"{name} labels must lie in [0, {n_classes - 1}]")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (y_true, y_pred), 1)
    return ConfusionMatrix(counts)


def report(cm: ConfusionMatrix, metadata: dict | None = None) -> EvaluationReport:
    """Accuracy plus per-class and macro precision/recall/F1 from counts."""
    counts = cm.counts
    total = counts.sum()
    if total <= 0:
        raise ShapeError("confusion matrix is empty")
    tp = np.diag(counts).astype(np.float64)
    pred_totals = counts.sum(axis=0).astype(np.float64)
    true_totals = counts.sum(axis=1).astype(np.float64)

    precision = np.divide(tp, pred_totals, out=np.zeros_like(tp),
                          where=pred_totals > 0)
    recall = np.divide(tp, true_totals, out=np.zeros_like(tp),
                       where=true_totals > 0)
    pr_sum = precision + recall
    f1 = np.divide(2.0 * precision * recall, pr_sum, out=np.zeros_like(tp),
                   where=pr_sum > 0)

    return EvaluationReport(
        confusion=cm,
        accuracy=float(tp.sum() / total),
        precision=precision,
        recall=recall,
        f1=f1,
        macro_precision=float(precision.mean()),
        macro_recall=float(recall.mean()),
        macro_f1=float(f1.mean()),
        metadata=dict(metadata or {}),
    )


def evaluate(y_true, y_pred, n_classes: int,
             metadata: dict | None = None) -> EvaluationReport:
    """confusion + report in one call."""
    return report(confusion(y_true, y_pred, n_classes), metadata)
