"""
Збалансована точність за підмножинами класів та матриця невідповідностей
24 x 25 (останній стовпець - викид (NoDir, NoMod)).
"""

from dataclasses import dataclass

import numpy as np
import pandas as pd

from comhom.common.exceptions import MetricError
from comhom.data.labels import (
    CLASS_NAMES, COMBO_CLASSES, N_CLASSES, OUTLIER_INDEX, PREDICTION_NAMES, SINGLE_CLASSES, GestureLabel,
)

SUBSETS = {
    "single": SINGLE_CLASSES,
    "combo": COMBO_CLASSES,
    "all": list(range(N_CLASSES)),
}


def as_class_indices(labels):
    """Приймає список GestureLabel або масив індексів класів."""
    if len(labels) and isinstance(labels[0], GestureLabel):
        return np.array([label.class_index for label in labels], dtype=np.int64)
    return np.asarray(labels, dtype=np.int64)


def per_class_recall(true_classes, predicted_classes, classes):
    recalls = []
    for class_index in classes:
        members = true_classes == class_index
        if not members.any():
            raise MetricError(f"Клас {CLASS_NAMES[class_index]} відсутній серед справжніх міток")
        recalls.append(float(np.mean(predicted_classes[members] == class_index)))
    return np.array(recalls)


def balanced_accuracy(true_labels, predicted_labels, subset="all"):
    """
    Середня повнота (recall) за класами підмножини.

    Прогнози поза підмножиною, зокрема викид, рахуються як помилки.

    Args:
        true_labels: Справжні мітки (GestureLabel або індекси 0..23).
        predicted_labels: Прогнози (GestureLabel або індекси 0..24).
        subset (str): 'single', 'combo' або 'all'.

    Raises:
        MetricError: Клас підмножини відсутній серед справжніх міток.
    """
    if subset not in SUBSETS:
        raise MetricError(f"Невідома підмножина класів: {subset}")
    true_classes = as_class_indices(true_labels)
    predicted_classes = as_class_indices(predicted_labels)
    if true_classes.shape != predicted_classes.shape:
        raise MetricError("Кількість прогнозів не збігається з кількістю міток")
    return float(per_class_recall(true_classes, predicted_classes, SUBSETS[subset]).mean())


def accuracy_summary(true_labels, predicted_labels):
    return {
        "acc_single": balanced_accuracy(true_labels, predicted_labels, "single"),
        "acc_comb": balanced_accuracy(true_labels, predicted_labels, "combo"),
        "acc_all": balanced_accuracy(true_labels, predicted_labels, "all"),
    }


@dataclass(frozen=True)
class ConfusionMatrix:
    """Лічильники: рядки - 24 справжні класи, стовпці - 24 класи плюс викид."""

    counts: np.ndarray

    @property
    def normalized(self):
        totals = self.counts.sum(axis=1, keepdims=True)
        return np.divide(self.counts, totals, out=np.zeros(self.counts.shape), where=totals > 0)

    def recall(self):
        return np.diag(self.normalized[:, :N_CLASSES])

    def to_frame(self, normalized=False):
        values = self.normalized if normalized else self.counts
        return pd.DataFrame(values, index=pd.Index(CLASS_NAMES, name="true"), columns=PREDICTION_NAMES)


def confusion_matrix(true_labels, predicted_labels):
    true_classes = as_class_indices(true_labels)
    predicted_classes = as_class_indices(predicted_labels)
    if np.any(true_classes >= N_CLASSES):
        raise MetricError("Викид (NoDir, NoMod) не може бути справжньою міткою")
    counts = np.zeros((N_CLASSES, OUTLIER_INDEX + 1), dtype=np.int64)
    np.add.at(counts, (true_classes, predicted_classes), 1)
    return ConfusionMatrix(counts)
