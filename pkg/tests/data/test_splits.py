"""
Тести для розбиття leave-one-subject-out.
"""

import numpy as np
import pytest

from comhom.common.exceptions import SplitError
from comhom.data.splits import split_loso, stratified_indices


def test_subject_roles(tiny_cohort):
    """Тестує ролі суб'єктів: тестовий за позицією, валідаційний - найменший серед решти."""
    split = split_loso(tiny_cohort, fold=0)

    assert split.eval_subject == 0
    assert split.val_subject == 1
    assert split.pretrain_subjects == (2, 3)
    assert split.pretrain.roster() == [2, 3]
    assert split.validation.roster() == [1]


def test_held_out_partition(tiny_cohort):
    """Калібрувальна частина отримує floor(0.8·3) = 2 вікна на клас, тестова - 1."""
    split = split_loso(tiny_cohort, fold=2)

    assert split.eval_subject == 2
    assert np.all(split.calibration.class_counts() == 2)
    assert np.all(split.test.class_counts() == 1)
    assert len(split.calibration) + len(split.test) == len(tiny_cohort.for_subjects([2]))


def test_split_is_deterministic(tiny_cohort):
    first = split_loso(tiny_cohort, fold=1, seed=4)
    second = split_loso(tiny_cohort, fold=1, seed=4)
    np.testing.assert_array_equal(first.test.samples, second.test.samples)


def test_fold_out_of_range(tiny_cohort):
    with pytest.raises(SplitError):
        split_loso(tiny_cohort, fold=4)


def test_too_few_subjects(tiny_cohort):
    with pytest.raises(SplitError):
        split_loso(tiny_cohort.for_subjects([0, 1]), fold=0)


def test_stratified_indices_cover_everything():
    classes = np.array([0, 0, 0, 0, 0, 5, 5])
    first, rest = stratified_indices(classes, 0.8, np.random.default_rng(0))
    assert len(first) == 4 + 1
    assert sorted(np.concatenate([first, rest]).tolist()) == list(range(7))
