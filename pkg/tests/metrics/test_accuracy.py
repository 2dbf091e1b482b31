"""
Тести для збалансованої точності та матриці невідповідностей.
"""

import numpy as np
import pytest

from comhom.common.exceptions import MetricError
from comhom.data.labels import CLASS_LABELS, OUTLIER, OUTLIER_INDEX
from comhom.metrics.accuracy import accuracy_summary, balanced_accuracy, confusion_matrix, per_class_recall

ALL_CLASSES = np.repeat(np.arange(24), 3)


def test_perfect_predictions():
    summary = accuracy_summary(ALL_CLASSES, ALL_CLASSES)
    assert summary == {"acc_single": 1.0, "acc_comb": 1.0, "acc_all": 1.0}


def test_one_class_right_one_wrong():
    true = np.array([0, 0, 1, 1])
    predicted = np.array([0, 0, 0, 0])
    np.testing.assert_array_equal(per_class_recall(true, predicted, [0, 1]), [1.0, 0.0])
    assert balanced_accuracy(np.r_[true, np.arange(2, 8)], np.r_[predicted, np.arange(2, 8)], "single") == 7 / 8


def test_balanced_accuracy_ignores_class_frequencies():
    """Часті класи не домінують: середнє повнот, а не частка правильних."""
    true = np.r_[np.full(90, 8), np.full(10, 9), np.arange(10, 24)]
    predicted = np.r_[np.full(90, 8), np.full(10, 8), np.arange(10, 24)]
    assert np.isclose(balanced_accuracy(true, predicted, "combo"), 15 / 16)


def test_outlier_predictions_count_as_errors():
    predicted = np.where(ALL_CLASSES < 8, ALL_CLASSES, OUTLIER_INDEX)
    summary = accuracy_summary(ALL_CLASSES, predicted)
    assert summary["acc_single"] == 1.0
    assert summary["acc_comb"] == 0.0
    assert np.isclose(summary["acc_all"], 8 / 24)


def test_accepts_gesture_labels():
    assert balanced_accuracy(CLASS_LABELS, CLASS_LABELS) == 1.0
    predicted = [OUTLIER] * 8 + CLASS_LABELS[8:]
    assert balanced_accuracy(CLASS_LABELS, predicted, "single") == 0.0


def test_missing_subset_class_raises():
    with pytest.raises(MetricError):
        balanced_accuracy(np.arange(8), np.arange(8), "combo")


def test_confusion_identity_and_outlier_column():
    identity = confusion_matrix(ALL_CLASSES, ALL_CLASSES)
    np.testing.assert_array_equal(identity.counts[:, :24], 3 * np.eye(24, dtype=np.int64))

    outliers = confusion_matrix(ALL_CLASSES, np.full_like(ALL_CLASSES, OUTLIER_INDEX))
    assert outliers.counts[:, OUTLIER_INDEX].sum() == len(ALL_CLASSES)
    np.testing.assert_allclose(outliers.normalized.sum(axis=1), 1.0)


def test_confusion_recall_matches_balanced_accuracy():
    """Середнє діагоналі нормованої матриці дорівнює balanced_accuracy(all)."""
    # Arrange
    rng = np.random.default_rng(0)
    true = np.repeat(np.arange(24), 5)
    predicted = np.where(rng.random(true.size) < 0.6, true, rng.integers(0, 25, size=true.size))

    # Act
    matrix = confusion_matrix(true, predicted)

    # Assert
    assert np.isclose(matrix.recall().mean(), balanced_accuracy(true, predicted, "all"))
    np.testing.assert_array_equal(matrix.counts.sum(axis=1), np.full(24, 5))
    frame = matrix.to_frame(normalized=True)
    assert frame.shape == (24, 25)
    assert frame.columns[-1] == "NoDir+NoMod"
