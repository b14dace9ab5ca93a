"""Confusion-matrix point metrics.

Orientation is fixed throughout: ``counts[j, k]`` is the number of items whose
true class is ``k`` and that were predicted as class ``j``.  Columns are truth,
rows are predictions, so the column sums are the per-class trial counts.

Accuracy-like ratios are computed with exact rational arithmetic on the
integer counts and converted to float once, so identities such as
``micro_f1 == accuracy`` hold bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray
    class_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise ValueError(f"confusion matrix must be square, got shape {counts.shape}")
        if counts.shape[0] < 2:
            raise ValueError("confusion matrix needs at least 2 classes")
        if not np.issubdtype(counts.dtype, np.integer):
            if not np.all(np.equal(np.mod(counts, 1), 0)):
                raise ValueError("confusion matrix counts must be integers")
            counts = counts.astype(np.int64)
        if np.any(counts < 0):
            raise ValueError("confusion matrix counts must be nonnegative")
        counts = counts.astype(np.int64)
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        names = tuple(self.class_names) or tuple(str(k) for k in range(counts.shape[0]))
        if len(names) != counts.shape[0]:
            raise ValueError("class_names length must match matrix size")
        object.__setattr__(self, "class_names", names)

    @property
    def m(self) -> int:
        return self.counts.shape[0]

    @property
    def class_totals(self) -> np.ndarray:
        """True count per class (column sums)."""
        return self.counts.sum(axis=0)

    @property
    def predicted_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def correct(self) -> np.ndarray:
        return np.diag(self.counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def _as_cm(cm) -> ConfusionMatrix:
    return cm if isinstance(cm, ConfusionMatrix) else ConfusionMatrix(np.asarray(cm))


def confusion_matrix(true_labels: Sequence[int], predicted_labels: Sequence[int], m: int = 2) -> ConfusionMatrix:
    """Tally ``counts[pred, truth]`` over paired label sequences."""
    t = np.asarray(true_labels)
    p = np.asarray(predicted_labels)
    if t.shape != p.shape or t.ndim != 1:
        raise ValueError(f"label arrays must be 1-D with equal length, got {t.shape} and {p.shape}")
    for name, arr in (("true", t), ("predicted", p)):
        if arr.size and (np.any(arr < 0) or np.any(arr >= m) or np.any(arr != np.round(arr))):
            raise ValueError(f"{name} labels must be integers in [0, {m})")
    counts = np.zeros((m, m), dtype=np.int64)
    np.add.at(counts, (p.astype(np.int64), t.astype(np.int64)), 1)
    return ConfusionMatrix(counts)


def accuracy(cm) -> float:
    cm = _as_cm(cm)
    if cm.total == 0:
        raise ValueError("accuracy of an empty confusion matrix is undefined")
    return float(Fraction(int(cm.correct.sum()), cm.total))


def balanced_accuracy(cm) -> float:
    """Mean per-class recall, ``(1/m) * sum_k C_kk / n_k``."""
    cm = _as_cm(cm)
    totals = cm.class_totals
    if np.any(totals == 0):
        missing = [cm.class_names[k] for k in np.flatnonzero(totals == 0)]
        raise ValueError(f"classes absent from truth: {missing}")
    recalls = sum(Fraction(int(c), int(n)) for c, n in zip(cm.correct, totals))
    return float(recalls / cm.m)


class PrecisionRecall(NamedTuple):
    precision: np.ndarray
    recall: np.ndarray
    never_predicted: tuple[int, ...]


def precision_recall(cm) -> PrecisionRecall:
    """Per-class precision and recall.

    Precision for a class that was never predicted has an empty denominator;
    it is reported as 0 and the class index is listed in ``never_predicted``.
    """
    cm = _as_cm(cm)
    totals = cm.class_totals
    if np.any(totals == 0):
        raise ValueError("recall undefined: some class has no true items")
    predicted = cm.predicted_totals
    correct = cm.correct
    never = tuple(int(k) for k in np.flatnonzero(predicted == 0))
    precision = np.array(
        [float(Fraction(int(c), int(p))) if p else 0.0 for c, p in zip(correct, predicted)]
    )
    recall = np.array([float(Fraction(int(c), int(n))) for c, n in zip(correct, totals)])
    return PrecisionRecall(precision, recall, never)


def f_beta(precision: float, recall: float, beta: float = 1.0) -> float:
    """Weighted harmonic mean of precision and recall.

    ``P = R = 0`` has no defined value; 0 is returned and callers that care
    should record it (see :func:`quality_flags`).
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    for name, v in (("precision", precision), ("recall", recall)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {v}")
    if precision == recall:
        return float(precision)
    b2 = beta * beta
    return (b2 + 1.0) * precision * recall / (b2 * precision + recall)


def micro_f1(cm) -> float:
    cm = _as_cm(cm)
    if cm.total == 0:
        raise ValueError("micro F1 of an empty confusion matrix is undefined")
    tp = int(cm.correct.sum())
    off = cm.counts.sum() - tp
    # false positives summed over classes and false negatives summed over
    # classes both equal the off-diagonal mass for single-label data
    fp = int(off)
    fn = int(off)
    mi_p = float(Fraction(tp, tp + fp))
    mi_r = float(Fraction(tp, tp + fn))
    return f_beta(mi_p, mi_r, 1.0)


def macro_f1(cm) -> float:
    cm = _as_cm(cm)
    pr = precision_recall(cm)
    scores = [f_beta(p, r, 1.0) for p, r in zip(pr.precision, pr.recall)]
    return float(np.mean(scores))


def class_bias(labels: Sequence[int]) -> float:
    """Proportion of the majority class."""
    labels = np.asarray(labels)
    if labels.size == 0:
        raise ValueError("class bias of an empty label set is undefined")
    _, counts = np.unique(labels, return_counts=True)
    return float(Fraction(int(counts.max()), int(labels.size)))


def quality_flags(cm) -> list[str]:
    """Zero-denominator conditions worth recording next to the metrics."""
    cm = _as_cm(cm)
    flags = []
    for k in np.flatnonzero(cm.class_totals == 0):
        flags.append(f"class_{cm.class_names[k]}_absent")
    for k in np.flatnonzero(cm.predicted_totals == 0):
        flags.append(f"class_{cm.class_names[k]}_never_predicted")
    return flags
