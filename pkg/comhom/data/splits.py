"""
Розбиття leave-one-subject-out.

Суб'єкт з позицією `fold` у відсортованому списку стає тестовим; його дані
стратифіковано діляться на калібрувальні (floor(0.8·n) на клас) та тестові.
Найменший ідентифікатор серед решти суб'єктів відкладається для ранньої
зупинки, інші утворюють набір попереднього навчання.
"""

from dataclasses import dataclass

import numpy as np

from comhom.common.exceptions import SplitError
from comhom.nncore.rng import make_stream
from .labels import N_CLASSES

CALIB_FRACTION = 0.8


@dataclass(frozen=True)
class LosoSplit:
    """Чотири частини одного фолду та ролі суб'єктів."""

    pretrain: object
    validation: object
    calibration: object
    test: object
    eval_subject: int
    val_subject: int
    pretrain_subjects: tuple


def stratified_indices(classes, fraction, rng):
    """
    Повертає (перші, решта) індекси: floor(fraction·n) кожного класу йдуть у першу частину.
    """
    first, rest = [], []
    for class_index in range(N_CLASSES):
        members = np.flatnonzero(classes == class_index)
        if members.size == 0:
            continue
        members = rng.permutation(members)
        cut = int(np.floor(fraction * members.size))
        first.append(members[:cut])
        rest.append(members[cut:])
    take = lambda parts: np.sort(np.concatenate(parts)) if parts else np.zeros(0, dtype=np.int64)
    return take(first), take(rest)


def split_loso(dataset, fold, calib_fraction=CALIB_FRACTION, seed=0):
    """
    Розбиває набір для одного фолду LOSO.

    Args:
        dataset (Dataset): Повний набір.
        fold (int): Позиція тестового суб'єкта у відсортованому списку.
        calib_fraction (float): Частка калібрувальних даних (0.8).
        seed (int): Сід для стратифікованого перемішування.

    Returns:
        LosoSplit: (D_pre, D_val, D_calib, D_test) та ролі суб'єктів.

    Raises:
        SplitError: fold поза діапазоном або менше трьох суб'єктів.
    """
    roster = dataset.roster()
    if len(roster) < 3:
        raise SplitError(f"Для LOSO потрібно щонайменше 3 суб'єкти, маємо {len(roster)}")
    if not 0 <= fold < len(roster):
        raise SplitError(f"Fold {fold} поза діапазоном [0, {len(roster)})")

    eval_subject = roster[fold]
    others = [s for s in roster if s != eval_subject]
    val_subject = min(others)
    pretrain_subjects = tuple(s for s in others if s != val_subject)

    held_out = dataset.for_subjects([eval_subject])
    calib_idx, test_idx = stratified_indices(held_out.classes, calib_fraction, make_stream(seed, "split", fold))

    return LosoSplit(
        pretrain=dataset.for_subjects(pretrain_subjects),
        validation=dataset.for_subjects([val_subject]),
        calibration=held_out.subset(calib_idx),
        test=held_out.subset(test_idx),
        eval_subject=eval_subject,
        val_subject=val_subject,
        pretrain_subjects=pretrain_subjects,
    )
