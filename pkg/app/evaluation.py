"""
Classification accuracy
Confusion matrices over ground-truth pixels, overall accuracy, mean recall and the CSV report
"""

import csv
import io
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sklearn.metrics import confusion_matrix

from app.errors import ConfigError, EmptyEvaluationError, FormatError
from app.wishart import ClassMap, LabelMask

logger = logging.getLogger(__name__)

DECIMALS = 2


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """
    Pixel counts with rows = true class and columns = assigned class.

    class_ids and names follow the row/column order.
    """
    class_ids: Tuple[int, ...]
    names: Tuple[str, ...]
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def percentages(self) -> np.ndarray:
        """Row percentages; rows without pixels are all zero"""
        rows = self.counts.sum(axis=1, keepdims=True)
        return np.where(rows > 0, 100.0 * self.counts / np.where(rows > 0, rows, 1), 0.0)

    def to_csv(self) -> str:
        return format_confusion_csv(self.names, self.percentages, overall_accuracy(self))


def confusion(truth: LabelMask, predicted: ClassMap, class_ids: Optional[Sequence[int]] = None,
              names: Optional[Sequence[str]] = None) -> ConfusionMatrix:
    """
    Tabulate predicted against true labels over pixels with truth != 0.

    Raises:
        ConfigError: dimensions differ, names do not match the classes, or a labeled
            pixel carries a true or predicted class outside class_ids
        EmptyEvaluationError: truth has no labeled pixel
    """
    if truth.labels.shape != predicted.labels.shape:
        raise ConfigError(
            f"truth is {truth.width}x{truth.height} but prediction is {predicted.width}x{predicted.height}"
        )
    labeled = truth.labels != 0
    if not labeled.any():
        raise EmptyEvaluationError("truth mask has no labeled pixels")

    y_true = truth.labels[labeled].astype(int)
    y_pred = predicted.labels[labeled].astype(int)
    if class_ids is None:
        class_ids = sorted(set(np.unique(y_true).tolist()) | set(np.unique(y_pred).tolist()))
    class_ids = tuple(int(c) for c in class_ids)
    stray = sorted(set(np.unique(y_true).tolist()) - set(class_ids))
    if stray:
        raise ConfigError(f"truth labels {stray} are not among the evaluated classes {list(class_ids)}")
    stray = sorted(set(np.unique(y_pred).tolist()) - set(class_ids))
    if stray:
        raise ConfigError(f"predicted labels {stray} are not among the evaluated classes {list(class_ids)}")
    if names is None:
        names = [f"class_{c}" for c in class_ids]
    if len(names) != len(class_ids):
        raise ConfigError(f"{len(names)} class names for {len(class_ids)} classes")

    counts = confusion_matrix(y_true, y_pred, labels=list(class_ids))
    cm = ConfusionMatrix(class_ids, tuple(names), counts)
    logger.info(
        f"Confusion over {cm.total} pixels: overall {overall_accuracy(cm):.2f}%, "
        f"mean recall {mean_recall(cm):.2f}%"
    )
    return cm


def overall_accuracy(cm: ConfusionMatrix) -> float:
    """100 * trace / total"""
    if cm.total == 0:
        raise EmptyEvaluationError("confusion matrix is empty")
    return 100.0 * float(np.trace(cm.counts)) / cm.total


def mean_recall(cm: ConfusionMatrix) -> float:
    """Unweighted mean of the diagonal row percentages over rows with pixels"""
    rows = cm.counts.sum(axis=1) > 0
    if not rows.any():
        raise EmptyEvaluationError("confusion matrix is empty")
    return float(np.diag(cm.percentages)[rows].mean())


def format_confusion_csv(names: Sequence[str], percentages, overall: float) -> str:
    """Header of class names, one row per true class, then overall,<value>; 2 decimals throughout"""
    percentages = np.asarray(percentages, dtype=np.float64)
    if percentages.shape != (len(names), len(names)):
        raise ConfigError(f"percentage table of shape {percentages.shape} for {len(names)} classes")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["class", *names])
    for name, row in zip(names, percentages):
        writer.writerow([name, *(f"{v:.{DECIMALS}f}" for v in row)])
    writer.writerow(["overall", f"{overall:.{DECIMALS}f}"])
    return buffer.getvalue()


def parse_confusion_csv(text: str, source: str = "<csv>") -> Tuple[List[str], np.ndarray, float]:
    """
    Inverse of format_confusion_csv.

    Raises:
        FormatError: malformed report; the offset is the 1-based line number
    """
    rows = [row for row in csv.reader(io.StringIO(text)) if row]
    if len(rows) < 2 or rows[0][:1] != ["class"]:
        raise FormatError(source, 1, "expected a 'class,<names...>' header")
    names = rows[0][1:]
    body = rows[1:-1]
    if len(body) != len(names):
        raise FormatError(source, len(rows), f"expected {len(names)} class rows, found {len(body)}")

    table = np.zeros((len(names), len(names)))
    for line, row in enumerate(body, start=2):
        if len(row) != len(names) + 1 or row[0] != names[line - 2]:
            raise FormatError(source, line, f"expected a row for class '{names[line - 2]}'")
        try:
            table[line - 2] = [float(v) for v in row[1:]]
        except ValueError as e:
            raise FormatError(source, line, str(e)) from e

    last = rows[-1]
    if len(last) != 2 or last[0] != "overall":
        raise FormatError(source, len(rows), "expected a final 'overall,<value>' line")
    try:
        overall = float(last[1])
    except ValueError as e:
        raise FormatError(source, len(rows), str(e)) from e
    return names, table, overall
