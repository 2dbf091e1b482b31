"""
Калібрувальні набори трьох режимів нагляду.

- `partial`: закодовані одиночні жести;
- `augmented`: одиночні жести плюс синтетичні комбінації (не більше
  `n_synth_per_class` на кожен з 16 класів);
- `full`: одиночні жести плюс реальні комбінації.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from loguru import logger

from comhom.common.exceptions import LabelError
from comhom.data.labels import (
    CLASS_NAMES, COMBO_CLASSES, N_ACTIVE, NO_DIR, NO_MOD, GestureLabel, class_indices,
)
from comhom.model.combination import combine_all_pairs
from comhom.model.encoder import encode

N_SYNTH_PER_CLASS = 500

REAL_SINGLE = "real-single"
REAL_COMBO = "real-combo"
SYNTHETIC_COMBO = "synthetic-combo"


class SupervisionMode(Enum):
    PARTIAL = "partial"
    AUGMENTED = "augmented"
    FULL = "full"


@dataclass(frozen=True)
class CalibrationSet:
    features: np.ndarray
    directions: np.ndarray
    modifiers: np.ndarray
    provenance: np.ndarray

    def __len__(self):
        return len(self.directions)

    @property
    def classes(self):
        return class_indices(self.directions, self.modifiers)

    @property
    def labels(self):
        return [GestureLabel.from_indices(d, m) for d, m in zip(self.directions, self.modifiers)]

    def count(self, provenance):
        return int(np.sum(self.provenance == provenance))


def subsample_per_class(classes, limit, rng):
    """
    Індекси не більше `limit` елементів кожного класу, без повторень.

    Якщо клас має менше елементів, береться весь клас (із попередженням).
    """
    chosen = []
    for class_index in np.unique(classes):
        members = np.flatnonzero(classes == class_index)
        if members.size < limit:
            logger.warning(
                f"Синтетичних прикладів класу {CLASS_NAMES[class_index]} лише {members.size} < {limit}; береться весь пул"
            )
            chosen.append(members)
        else:
            chosen.append(np.sort(rng.choice(members, size=limit, replace=False)))
    return np.concatenate(chosen) if chosen else np.zeros(0, dtype=np.int64)


def synthetic_combos(bundle, features, directions, modifiers):
    """
    Усі синтетичні комбінації з одиночних жестів (CombineAllPairs).

    Raises:
        LabelError: Якщо якийсь напрямок або модифікатор відсутній серед одиночних жестів.
    """
    direction_rows = np.flatnonzero((directions != NO_DIR) & (modifiers == NO_MOD))
    modifier_rows = np.flatnonzero((directions == NO_DIR) & (modifiers != NO_MOD))
    missing_dirs = set(range(N_ACTIVE)) - set(directions[direction_rows].tolist())
    missing_mods = set(range(N_ACTIVE)) - set(modifiers[modifier_rows].tolist())
    if missing_dirs or missing_mods:
        raise LabelError(
            f"Неможливо синтезувати всі 16 комбінацій: відсутні напрямки {sorted(missing_dirs)}, "
            f"модифікатори {sorted(missing_mods)}"
        )
    return combine_all_pairs(
        bundle.operator, features[direction_rows], directions[direction_rows],
        features[modifier_rows], modifiers[modifier_rows],
    )


def build_calibration_set(mode, bundle, d_calib, n_synth_per_class=N_SYNTH_PER_CLASS, rng=None, features=None):
    """
    Будує калібрувальний набір для режиму нагляду.

    Args:
        mode (SupervisionMode): Режим.
        bundle (TrainedBundle): Заморожені енкодер та оператор.
        d_calib (Dataset): Калібрувальні дані тестового суб'єкта.
        n_synth_per_class (int): Ліміт синтетичних прикладів на клас (augmented).
        rng (numpy.random.Generator): Потік підвибірки.
        features (ndarray, optional): Уже закодовані ознаки `d_calib`.

    Returns:
        CalibrationSet: Ознаки, компоненти міток та походження кожного елемента.
    """
    mode = SupervisionMode(mode)
    if features is None:
        features = encode(bundle.encoder, d_calib.samples)
    singles = np.flatnonzero(~np.isin(d_calib.classes, COMBO_CLASSES))
    parts = [(features[singles], d_calib.directions[singles], d_calib.modifiers[singles], REAL_SINGLE)]

    if mode is SupervisionMode.FULL:
        combos = np.flatnonzero(np.isin(d_calib.classes, COMBO_CLASSES))
        parts.append((features[combos], d_calib.directions[combos], d_calib.modifiers[combos], REAL_COMBO))
    elif mode is SupervisionMode.AUGMENTED:
        synth = synthetic_combos(bundle, features, d_calib.directions, d_calib.modifiers)
        keep = subsample_per_class(class_indices(synth.directions, synth.modifiers), n_synth_per_class, rng)
        synth = synth.subset(keep)
        parts.append((synth.features, synth.directions, synth.modifiers, SYNTHETIC_COMBO))

    calib = CalibrationSet(
        features=np.concatenate([p[0] for p in parts]),
        directions=np.concatenate([p[1] for p in parts]),
        modifiers=np.concatenate([p[2] for p in parts]),
        provenance=np.concatenate([np.full(len(p[1]), p[3], dtype=object) for p in parts]),
    )
    logger.debug(f"Калібрувальний набір '{mode.value}': {len(calib)} елементів")
    return calib
