"""Deterministic classification metrics computed exactly from a confusion matrix.

Orientation is fixed: rows are true classes, columns are predicted classes.
Metrics with a 0/0 denominator return ``None`` (an explicit undefined-metric
signal, never silently 0.0); the single documented exception is F1 with
precision = recall = 0, which is 0.0 so macro averages stay defined.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """M x M nonnegative integer counts; entry (j, k) = true j predicted k."""

    labels: tuple[str, ...]
    counts: np.ndarray

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        if len(labels) < 2:
            raise ParameterError("a confusion matrix needs at least 2 classes")
        if len(set(labels)) != len(labels):
            raise ParameterError("class labels must be unique")
        counts = np.asarray(self.counts)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise ParameterError(f"counts must be square, got shape {counts.shape}")
        if counts.shape[0] != len(labels):
            raise ParameterError(
                f"{len(labels)} labels but counts shape {counts.shape}"
            )
        if not np.issubdtype(counts.dtype, np.integer):
            if counts.dtype == object or not np.all(counts == np.floor(counts)):
                raise ParameterError("counts must be integers")
        counts = counts.astype(np.int64)
        if np.any(counts < 0):
            raise ParameterError("counts must be nonnegative")
        if counts.sum() == 0:
            raise ParameterError("total count must be positive")
        counts.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "counts", counts)

    @property
    def n_classes(self):
        return len(self.labels)

    @property
    def total(self):
        """N, the test-set size."""
        return int(self.counts.sum())

    def row_sums(self):
        """Observed per-class sample counts n_j."""
        return self.counts.sum(axis=1)

    def index_of(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise ParameterError(f"unknown class label {label!r}") from None


def _check_class_index(cm, j):
    if not isinstance(j, (int, np.integer)) or isinstance(j, bool):
        raise ParameterError(f"class index must be an integer, got {j!r}")
    if not 0 <= j < cm.n_classes:
        raise ParameterError(f"class index {j} out of range [0, {cm.n_classes})")


def class_precision(cm, j):
    """tp / (tp + fp): counts(j,j) over column j. None if the column is empty."""
    _check_class_index(cm, j)
    column = int(cm.counts[:, j].sum())
    if column == 0:
        return None
    return int(cm.counts[j, j]) / column


def class_recall(cm, j):
    """tp / (tp + fn): counts(j,j) over row j. None if the row is empty."""
    _check_class_index(cm, j)
    row = int(cm.counts[j, :].sum())
    if row == 0:
        return None
    return int(cm.counts[j, j]) / row


def class_f1(cm, j):
    """Harmonic mean of precision and recall; 0.0 when both are 0."""
    p = class_precision(cm, j)
    r = class_recall(cm, j)
    if p is None or r is None:
        return None
    if p + r == 0.0:
        return 0.0
    return 2.0 * p * r / (p + r)


def class_specificity(cm, j):
    """tn / (tn + fp) with tn counted off row j and off column j."""
    _check_class_index(cm, j)
    negatives = cm.total - int(cm.counts[j, :].sum())
    if negatives == 0:
        return None
    mask = np.ones(cm.n_classes, dtype=bool)
    mask[j] = False
    tn = int(cm.counts[np.ix_(mask, mask)].sum())
    return tn / negatives


def accuracy(cm):
    """trace / N; equals micro-averaged F1 for single-label problems."""
    return int(np.trace(cm.counts)) / cm.total


@dataclass(frozen=True)
class ClassMetrics:
    precision: float | None
    recall: float | None
    f1: float | None
    specificity: float | None


@dataclass(frozen=True)
class MetricReport:
    """Per-class and macro-averaged point metrics plus accuracy."""

    labels: tuple[str, ...]
    per_class: tuple[ClassMetrics, ...]
    macro_precision: float | None
    macro_recall: float | None
    macro_f1: float | None
    macro_specificity: float | None
    accuracy: float


def _macro(values):
    if any(v is None for v in values):
        return None
    return sum(values) / len(values)


def full_report(cm):
    """All per-class metrics, unweighted macro averages, and accuracy.

    Undefined per-class entries propagate: a macro average is None whenever
    any of its constituents is undefined.
    """
    per_class = tuple(
        ClassMetrics(
            precision=class_precision(cm, j),
            recall=class_recall(cm, j),
            f1=class_f1(cm, j),
            specificity=class_specificity(cm, j),
        )
        for j in range(cm.n_classes)
    )
    return MetricReport(
        labels=cm.labels,
        per_class=per_class,
        macro_precision=_macro([c.precision for c in per_class]),
        macro_recall=_macro([c.recall for c in per_class]),
        macro_f1=_macro([c.f1 for c in per_class]),
        macro_specificity=_macro([c.specificity for c in per_class]),
        accuracy=accuracy(cm),
    )
